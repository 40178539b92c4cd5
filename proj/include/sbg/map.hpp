#pragma once

#include <string>
#include <vector>

#include "sbg/set.hpp"

namespace sbg {

/// Componentwise affine function: dimension j of the output is
/// gain[j]*x[j] + offset[j]. Gains are non-negative rationals.
struct AffineFn {
  std::vector<Rat> gain;
  std::vector<Rat> offset;

  static AffineFn identity(int d);
  static AffineFn constant(const Point& target);

  int dim() const { return static_cast<int>(gain.size()); }
  bool isIdentity() const;
  Point apply(const Point& p) const;

  /// this after inner: x -> this(inner(x)).
  AffineFn after(const AffineFn& inner) const;

  bool operator==(const AffineFn& o) const = default;

  /// "v", "v-999", "v+[-999;-100]", "[2;2]", "v/2+3", ...
  std::string str() const;
};

/// Piecewise-linear map: pairwise-disjoint IntervalSet domains, one
/// AffineFn per piece. Image integrality and naturalness are validated
/// at construction from endpoints and step divisibility alone.
class PWLMap {
public:
  struct Piece {
    IntervalSet dom;
    AffineFn fn;
  };

  explicit PWLMap(int dim);

  /// Full validation: disjoint domains, non-negative gains, integral
  /// natural images, step divisibility.
  static PWLMap fromPieces(int dim, std::vector<Piece> pieces);

  static PWLMap identityOn(const IntervalSet& s);

  int dim() const { return dim_; }
  bool empty() const { return pieces_.empty(); }
  const std::vector<Piece>& pieces() const { return pieces_; }

  IntervalSet wholeDomain() const;
  IntervalSet image() const;

  Point apply(const Point& p) const;
  IntervalSet imageOf(const IntervalSet& s) const;
  IntervalSet preImageOf(const IntervalSet& s) const;

  PWLMap restrictedTo(const IntervalSet& s) const;

  /// Merges pieces with identical functions and sorts pieces by domain
  /// minimum; purely cosmetic, the denoted map is unchanged.
  PWLMap normalized() const;

  bool semanticallyEqual(const PWLMap& o) const;

  std::string str() const;

private:
  friend PWLMap compose(const PWLMap&, const PWLMap&);
  friend PWLMap combine(const PWLMap&, const PWLMap&);
  friend PWLMap minMap(const PWLMap&, const PWLMap&);
  friend PWLMap minAdjMap(const PWLMap&, const PWLMap&);
  friend PWLMap mapInf(const PWLMap&);

  static PWLMap assemble(int dim, std::vector<Piece> pieces,
                         bool checkDisjoint);
  void validatePiece(const Piece& p) const;

  int dim_;
  std::vector<Piece> pieces_;
};

/// m1 after m2 on the largest domain where that is defined.
PWLMap compose(const PWLMap& m1, const PWLMap& m2);

/// m1 where defined, m2 elsewhere.
PWLMap combine(const PWLMap& m1, const PWLMap& m2);

/// Pointwise lexicographic minimum on the shared domain (ties to m1),
/// whichever map is defined outside it.
PWLMap minMap(const PWLMap& m1, const PWLMap& m2);
PWLMap minMap(const PWLMap& m1, const PWLMap& m2, const PWLMap& m3);

/// map3 with map3(v) = min over the m1-fiber of v of m2, i.e.
/// min{m2(e) : m1(e) = v}; m1 and m2 must share their whole domain.
PWLMap minAdjMap(const PWLMap& m1, const PWLMap& m2);

/// Fixed point of self-composition, computed in closed form for
/// gain-1/negative-offset chains. Requires gains in {0,1} and, where the
/// gain is 1, an integer offset <= 0.
PWLMap mapInf(const PWLMap& m);

} // namespace sbg
