#pragma once

#include <string>
#include <vector>

#include "sbg/map.hpp"

namespace sbg {

/// One dimension of a generated term argument.
struct TermDim {
  enum class Kind { Value, Affine, Fresh };
  Kind kind = Kind::Value;
  Coord value = 0;           ///< Kind::Value
  Rat coef{0};               ///< Kind::Affine: coef*loopvar + shift
  Rat shift{0};
  Coord a = 0, s = 1, b = 0; ///< Kind::Fresh: summation progression

  std::string str(const std::string& var) const;
};

/// Argument vector of one effort()/flow() occurrence.
struct Term {
  std::vector<TermDim> dims;
  bool hasFresh() const;
};

/// Either an effort identity loop over one preimage box or the flow
/// balance of one atomic image box.
struct Equation {
  bool isFlow = false;
  MDInterval loop;        ///< effort: the preimage box; flow: the atom
  Term rhs;               ///< effort only: representative expression
  std::vector<Term> sums; ///< flow only: terms beside the atom's own flow

  std::string str() const;
};

struct EquationListing {
  int dim = 1;
  std::vector<Equation> equations;

  std::string str() const;
};

/// Loop variable of dimension j (0-based): i, j, k, ...
std::string loopVar(int j);

/// Requires an idempotent representative map (a connectComp result).
/// Splits the image into atomic boxes; per atom emits the effort
/// equations of every non-identity preimage piece (sorted by preimage
/// start) followed by one flow balance over the atom.
EquationListing generateEquations(const PWLMap& rmap);

} // namespace sbg
