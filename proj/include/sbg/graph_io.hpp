#pragma once

#include <string>

#include "sbg/graph.hpp"

namespace sbg {

/// Reads the line-oriented graph format:
///
///   # comment
///   dim 2
///   vertex Cell.l {[1001:1:2000]x[101:1:200]}
///   edge E1 Cell.l Cell.r
///   piece dom {[1:1:1]} map1 gain [0;0] off [1;1] map2 gain [1;0] off [0;2]
///   end
///
/// `dim` is optional (default 1) and must precede everything else.
/// Syntax problems raise ParseError with a location; problems building
/// the graph out of well-formed lines (unknown vertices, overlapping
/// piece domains, ...) raise ModelError.
SBGraph parseGraphFile(const std::string& text);

/// Inverse of parseGraphFile up to whitespace and piece refinement:
/// parseGraphFile(printGraphFile(g)) reproduces g with each edge's two
/// maps restated over a common piece refinement.
std::string printGraphFile(const SBGraph& g);

/// The same graph as a JSON document (output only). Rationals are
/// encoded as strings ("1", "-3/2") to stay exact.
std::string graphJson(const SBGraph& g);

} // namespace sbg
