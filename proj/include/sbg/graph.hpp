#pragma once

#include <string>
#include <vector>

#include "sbg/map.hpp"

namespace sbg {

struct SetVertex {
  std::string name;
  IntervalSet set;
};

/// One set-edge: two maps from a shared local edge-index set into the
/// two incident set-vertices (map1 into vertices[index1], map2 into
/// vertices[index2]).
struct SetEdge {
  std::string name;
  std::size_t index1 = 0;
  std::size_t index2 = 0;
  PWLMap map1{1};
  PWLMap map2{1};
};

struct SBGraph {
  int dim = 1;
  std::vector<SetVertex> vertices;
  std::vector<SetEdge> edges;

  std::size_t addVertex(std::string name, IntervalSet set);
  void addEdge(SetEdge e);
};

struct ValidationIssue {
  std::string where;
  std::string what;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string str() const;
};

/// Checks vertex disjointness, matching map domains, image containment,
/// equal nonzero gains within refined pieces, self-loops, and duplicate
/// vertex pairs. Reports every violation found.
ValidationReport validate(const SBGraph& g);

/// The two graph-level edge maps over one global edge-index set: each
/// edge's local domain is translated by a multiple of a power-of-ten
/// block larger than every local extent.
struct EdgeMaps {
  PWLMap emap1;
  PWLMap emap2;
};

EdgeMaps edgeMaps(const SBGraph& g);

struct ConnectStats {
  int iterations = 0; ///< passes that changed Image(Rmap)
  int passes = 0;     ///< total stabilization-loop passes
  std::vector<std::size_t> rmapPieces;
  std::size_t finalPieces = 0;
};

struct ConnectResult {
  PWLMap rmap;
  ConnectStats stats;
};

/// Connected components: the returned map sends every vertex to the
/// lexicographic minimum of its component. Expects a validated graph.
ConnectResult connectComp(const SBGraph& g);

} // namespace sbg
