#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbg/core.hpp"

namespace sbg {

/// One arithmetic progression per dimension: the box
/// [start1:step1:end1] x ... x [startd:stepd:endd].
/// Always normalized: steps >= 1, end actually attained, singleton
/// dimensions stored with step 1. Never empty.
class MDInterval {
public:
  /// Normalizes the raw description. Empty result (start > end in some
  /// dimension) is nullopt. Negative coordinates or steps < 1 are errors.
  static std::optional<MDInterval> make(std::vector<Coord> start,
                                        std::vector<Coord> step,
                                        std::vector<Coord> end);

  /// 1D convenience.
  static std::optional<MDInterval> make(Coord a, Coord s, Coord b);

  static MDInterval point(const Point& p);

  int dim() const { return static_cast<int>(start_.size()); }
  const std::vector<Coord>& start() const { return start_; }
  const std::vector<Coord>& step() const { return step_; }
  const std::vector<Coord>& end() const { return end_; }

  unsigned long long cardinality() const;
  bool contains(const Point& p) const;
  bool isSingleton() const;

  /// Lexicographic minimum, which is the start corner.
  Point minElem() const { return start_; }

  static std::optional<MDInterval> intersect(const MDInterval& a,
                                             const MDInterval& b);

  bool operator==(const MDInterval& o) const = default;

  /// "[a:s:b]" joined with "x" across dimensions.
  std::string str() const;

private:
  MDInterval() = default;
  std::vector<Coord> start_, step_, end_;
};

namespace detail {

/// Raw 1D progression; used by the set algebra, which needs the true
/// lcm step of an intersection before normalization.
struct Prog {
  Coord a, s, b;
};

/// Intersection of two nonempty progressions; keeps step = lcm even for
/// singleton results.
std::optional<Prog> intersectProg(const Prog& x, const Prog& y);

/// x minus y as disjoint progressions (residue classes of the lcm).
std::vector<Prog> minusProg(const Prog& x, const Prog& y);

} // namespace detail

} // namespace sbg
