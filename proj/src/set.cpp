#include "sbg/set.hpp"

#include <algorithm>
#include <sstream>

namespace sbg {

namespace {

bool pieceLess(const MDInterval& x, const MDInterval& y) {
  if (x.start() != y.start()) return x.start() < y.start();
  if (x.end() != y.end()) return x.end() < y.end();
  return x.step() < y.step();
}

// box difference: x \ y as disjoint boxes
std::vector<MDInterval> boxMinus(const MDInterval& x, const MDInterval& y) {
  int d = x.dim();
  std::vector<detail::Prog> common(d);
  for (int j = 0; j < d; ++j) {
    auto c = detail::intersectProg({x.start()[j], x.step()[j], x.end()[j]},
                                   {y.start()[j], y.step()[j], y.end()[j]});
    if (!c) return {x};
    common[j] = *c;
  }
  // points equal to the intersection in dims < j and off it in dim j
  std::vector<MDInterval> out;
  for (int j = 0; j < d; ++j) {
    auto diffs = detail::minusProg({x.start()[j], x.step()[j], x.end()[j]},
                                   {y.start()[j], y.step()[j], y.end()[j]});
    for (const auto& p : diffs) {
      std::vector<Coord> start(d), step(d), end(d);
      for (int k = 0; k < j; ++k) {
        start[k] = common[k].a;
        step[k] = common[k].s;
        end[k] = common[k].b;
      }
      start[j] = p.a;
      step[j] = p.s;
      end[j] = p.b;
      for (int k = j + 1; k < d; ++k) {
        start[k] = x.start()[k];
        step[k] = x.step()[k];
        end[k] = x.end()[k];
      }
      auto piece = MDInterval::make(std::move(start), std::move(step),
                                    std::move(end));
      if (piece) out.push_back(std::move(*piece));
    }
  }
  return out;
}

// merge b into a when they differ in exactly one dimension and are
// adjacent progressions there; returns the merged box
std::optional<MDInterval> tryMerge(const MDInterval& a, const MDInterval& b) {
  int d = a.dim();
  int diffDim = -1;
  for (int j = 0; j < d; ++j) {
    bool same = a.start()[j] == b.start()[j] && a.step()[j] == b.step()[j] &&
                a.end()[j] == b.end()[j];
    if (!same) {
      if (diffDim >= 0) return std::nullopt;
      diffDim = j;
    }
  }
  if (diffDim < 0) return std::nullopt;
  int j = diffDim;
  Coord a1 = a.start()[j], s1 = a.step()[j], b1 = a.end()[j];
  Coord a2 = b.start()[j], s2 = b.step()[j], b2 = b.end()[j];
  auto build = [&](Coord lo, Coord s, Coord hi) {
    std::vector<Coord> start = a.start(), step = a.step(), end = a.end();
    start[j] = lo;
    step[j] = s;
    end[j] = hi;
    return MDInterval::make(std::move(start), std::move(step), std::move(end));
  };
  bool aSingle = a1 == b1, bSingle = a2 == b2;
  if (aSingle && bSingle) {
    if (a2 - b1 == 1) return build(a1, 1, a2);
    if (a1 - b2 == 1) return build(a2, 1, a1);
    return std::nullopt;
  }
  if (aSingle) {
    if (a1 == a2 - s2) return build(a1, s2, b2);
    if (a1 == b2 + s2) return build(a2, s2, a1);
    return std::nullopt;
  }
  if (bSingle) {
    if (a2 == b1 + s1) return build(a1, s1, a2);
    if (a2 == a1 - s1) return build(a2, s1, b1);
    return std::nullopt;
  }
  if (s1 != s2) return std::nullopt;
  if (a2 == b1 + s1) return build(a1, s1, b2);
  if (a1 == b2 + s1) return build(a2, s1, b1);
  return std::nullopt;
}

} // namespace

IntervalSet::IntervalSet(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionError("set dimension must be >= 1");
}

IntervalSet::IntervalSet(const MDInterval& piece) : dim_(piece.dim()) {
  pieces_.push_back(piece);
}

IntervalSet IntervalSet::fromPieces(int dim,
                                    const std::vector<MDInterval>& pieces) {
  IntervalSet acc(dim);
  for (const auto& p : pieces) {
    if (p.dim() != dim) throw DimensionError("piece dimension mismatch");
    acc = setUnion(acc, IntervalSet(p));
  }
  return acc;
}

IntervalSet IntervalSet::fromDisjoint(int dim,
                                      std::vector<MDInterval> pieces) {
  IntervalSet r(dim);
  r.pieces_ = std::move(pieces);
  r.compact();
  r.checkLimit();
  return r;
}

void IntervalSet::compact() {
  std::sort(pieces_.begin(), pieces_.end(), pieceLess);
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < pieces_.size() && !merged; ++i) {
      for (std::size_t k = i + 1; k < pieces_.size() && !merged; ++k) {
        if (auto m = tryMerge(pieces_[i], pieces_[k])) {
          pieces_[i] = std::move(*m);
          pieces_.erase(pieces_.begin() + k);
          merged = true;
        }
      }
    }
  }
  std::sort(pieces_.begin(), pieces_.end(), pieceLess);
}

void IntervalSet::checkLimit() const {
  if (pieces_.size() > pieceLimit())
    throw PieceLimitError("set would hold " + std::to_string(pieces_.size()) +
                          " pieces (limit " + std::to_string(pieceLimit()) +
                          ")");
}

unsigned long long IntervalSet::cardinality() const {
  unsigned long long n = 0;
  for (const auto& p : pieces_) n = checkedAddU(n, p.cardinality());
  return n;
}

bool IntervalSet::contains(const Point& p) const {
  for (const auto& piece : pieces_)
    if (piece.contains(p)) return true;
  return false;
}

Point IntervalSet::setMin() const {
  if (empty()) throw DomainError("setMin of an empty set");
  Point best = pieces_[0].minElem();
  for (const auto& p : pieces_) best = std::min(best, p.minElem());
  return best;
}

std::string IntervalSet::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) os << ", ";
    os << pieces_[i].str();
  }
  os << '}';
  return os.str();
}

IntervalSet setUnion(const IntervalSet& a, const IntervalSet& b) {
  if (a.dim() != b.dim()) throw DimensionError("setUnion: dimension mismatch");
  IntervalSet extra = setMinus(b, a);
  std::vector<MDInterval> pieces = a.pieces_;
  pieces.insert(pieces.end(), extra.pieces_.begin(), extra.pieces_.end());
  return IntervalSet::fromDisjoint(a.dim(), std::move(pieces));
}

IntervalSet setIntersection(const IntervalSet& a, const IntervalSet& b) {
  if (a.dim() != b.dim())
    throw DimensionError("setIntersection: dimension mismatch");
  std::vector<MDInterval> pieces;
  for (const auto& pa : a.pieces_)
    for (const auto& pb : b.pieces_)
      if (auto i = MDInterval::intersect(pa, pb)) pieces.push_back(*i);
  return IntervalSet::fromDisjoint(a.dim(), std::move(pieces));
}

IntervalSet setMinus(const IntervalSet& a, const IntervalSet& b) {
  if (a.dim() != b.dim()) throw DimensionError("setMinus: dimension mismatch");
  std::vector<MDInterval> current = a.pieces_;
  for (const auto& pb : b.pieces_) {
    std::vector<MDInterval> next;
    for (const auto& pa : current) {
      auto parts = boxMinus(pa, pb);
      next.insert(next.end(), parts.begin(), parts.end());
    }
    current = std::move(next);
    if (current.size() > pieceLimit())
      throw PieceLimitError("setMinus exceeded the piece limit");
  }
  return IntervalSet::fromDisjoint(a.dim(), std::move(current));
}

bool setEquals(const IntervalSet& a, const IntervalSet& b) {
  return setMinus(a, b).empty() && setMinus(b, a).empty();
}

} // namespace sbg
