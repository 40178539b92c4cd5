#pragma once

#include <string>
#include <vector>

#include "sbg/codegen.hpp"
#include "sbg/connect_model.hpp"
#include "sbg/graph.hpp"

namespace sbg {

/// Placement of one connector inside the global vertex space.
struct ConnectorInfo {
  std::string name;
  bool scalar = false;
  int ordinal = 0;            ///< 1-based among scalars / among arrays
  std::vector<Coord> extents; ///< padded to the graph dimension with 1s
  std::vector<Coord> base;    ///< arrays: element = base + index per dim
  IntervalSet set{1};
};

/// Injective numbering: scalar k sits at the point (k,...,k); the k-th
/// array connector occupies k*B[j]+1 .. k*B[j]+extent[j] in dimension j,
/// where the block B[j] is a power of ten covering every extent and the
/// scalar count.
struct VertexNumbering {
  int dim = 1;
  std::vector<Coord> block;
  std::vector<ConnectorInfo> connectors;
  Params params; ///< bindings the numbering was made with

  const ConnectorInfo* find(const std::string& name) const;
};

/// Dotted declarations pin connectors (and their numbering order) up
/// front; everything else enters in order of first use, with extents
/// taken from a base declaration or inferred from the indices actually
/// attained.
VertexNumbering numberVertices(const ConnectModel& model, const Params& params);

struct BuildOutput {
  SBGraph graph;
  std::vector<std::string> warnings;
};

/// One set-vertex per connector; all connections between the same pair
/// of connectors merge into one multi-piece set-edge. Duplicate
/// connections are dropped with a warning; connecting a connector
/// element to itself is an error.
BuildOutput buildGraph(const ConnectModel& model, const VertexNumbering& numbering);

struct FlattenOutput {
  VertexNumbering numbering;
  SBGraph graph;
  std::vector<std::string> warnings;
  ConnectResult components;
  EquationListing equations;
};

/// number -> build -> validate -> connected components -> equations.
FlattenOutput flattenModel(const ConnectModel& model, const Params& params);

} // namespace sbg
