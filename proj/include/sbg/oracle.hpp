#pragma once

#include <utility>

#include "sbg/graph.hpp"

namespace sbg {

/// Element-by-element expansion of a graph, for cross-checking the
/// interval algorithms on instances small enough to enumerate.
struct ExplicitGraph {
  std::vector<Point> vertices; ///< sorted
  std::vector<std::pair<std::size_t, std::size_t>> edges; ///< indices into vertices
};

/// Lists every vertex element and, through the global edge maps, every
/// edge element's endpoint pair. Throws PieceLimitError once more than
/// limit elements would be listed.
ExplicitGraph expand(const SBGraph& g, unsigned long long limit = 100000);

/// For each expanded vertex, the lexicographic minimum of its component.
std::vector<Point> ufComponents(const ExplicitGraph& eg);

struct OracleCheck {
  unsigned long long checked = 0;
  unsigned long long mismatchCount = 0;
  std::vector<std::string> mismatches; ///< first 10 kept verbatim

  bool ok() const { return mismatchCount == 0; }
  std::string str() const;
};

/// Compares rmap pointwise against union-find on the expanded graph.
OracleCheck checkAgainstOracle(const SBGraph& g, const PWLMap& rmap,
                               unsigned long long limit = 100000);

} // namespace sbg
