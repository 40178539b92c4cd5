#pragma once

#include <string>
#include <vector>

#include "sbg/interval.hpp"

namespace sbg {

/// Finite union of pairwise-disjoint MDIntervals of one dimension.
/// All operations stay at the level of interval descriptions; nothing
/// ever enumerates members.
class IntervalSet {
public:
  explicit IntervalSet(int dim);
  explicit IntervalSet(const MDInterval& piece);

  /// Builds from arbitrary (possibly overlapping) pieces by repeated union.
  static IntervalSet fromPieces(int dim, const std::vector<MDInterval>& pieces);

  int dim() const { return dim_; }
  bool empty() const { return pieces_.empty(); }
  const std::vector<MDInterval>& pieces() const { return pieces_; }

  unsigned long long cardinality() const;
  bool contains(const Point& p) const;

  /// Lexicographic minimum over all members.
  Point setMin() const;

  std::string str() const;

private:
  friend IntervalSet setUnion(const IntervalSet&, const IntervalSet&);
  friend IntervalSet setIntersection(const IntervalSet&, const IntervalSet&);
  friend IntervalSet setMinus(const IntervalSet&, const IntervalSet&);
  friend class PWLMap;

  /// Pieces already known pairwise disjoint; compacts and sorts only.
  static IntervalSet fromDisjoint(int dim, std::vector<MDInterval> pieces);

  void compact();
  void checkLimit() const;

  int dim_;
  std::vector<MDInterval> pieces_;
};

IntervalSet setUnion(const IntervalSet& a, const IntervalSet& b);
IntervalSet setIntersection(const IntervalSet& a, const IntervalSet& b);
IntervalSet setMinus(const IntervalSet& a, const IntervalSet& b);
bool setEquals(const IntervalSet& a, const IntervalSet& b);

} // namespace sbg
