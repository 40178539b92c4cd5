#include "sbg/interval.hpp"

#include <numeric>
#include <sstream>

namespace sbg {

namespace detail {

namespace {

// Smallest non-negative x with s*x == c (mod t), given gcd(s,t) | c.
Coord solveCongruence(Coord s, Coord c, Coord t) {
  Coord g = std::gcd(s, t);
  Coord tg = t / g;
  if (tg == 1) return 0;
  Coord sg = (s / g) % tg;
  Coord cg = (c / g) % tg;
  if (cg < 0) cg += tg;
  // extended Euclid for the inverse of sg mod tg
  Coord r0 = sg, r1 = tg, x0 = 1, x1 = 0;
  while (r1 != 0) {
    Coord q = r0 / r1;
    Coord r2 = r0 - q * r1;
    Coord x2 = x0 - q * x1;
    r0 = r1; r1 = r2;
    x0 = x1; x1 = x2;
  }
  Coord inv = x0 % tg;
  if (inv < 0) inv += tg;
  return static_cast<Coord>((static_cast<__int128>(cg) * inv) % tg);
}

} // namespace

std::optional<Prog> intersectProg(const Prog& x, const Prog& y) {
  Coord lo = std::max(x.a, y.a);
  Coord hi = std::min(x.b, y.b);
  if (lo > hi) return std::nullopt;
  Coord g = std::gcd(x.s, y.s);
  Coord diff = checkedSub(y.a, x.a);
  if (diff % g != 0) return std::nullopt;
  Coord l = coordLcm(x.s, y.s);
  // first element of {x.a + x.s*k} that is == y.a (mod y.s)
  Coord k0 = solveCongruence(x.s, diff, y.s);
  __int128 c = static_cast<__int128>(x.a) + static_cast<__int128>(x.s) * k0;
  if (c < lo)
    c += ((static_cast<__int128>(lo) - c + l - 1) / l) * l;
  if (c > hi) return std::nullopt;
  Coord first = static_cast<Coord>(c);
  Coord last = first + ((hi - first) / l) * l;
  return Prog{first, l, last};
}

std::vector<Prog> minusProg(const Prog& x, const Prog& y) {
  auto common = intersectProg(x, y);
  if (!common) return {x};
  Coord l = common->s; // lcm of the two steps
  Coord classes = l / x.s;
  if (static_cast<unsigned long long>(classes) > pieceLimit())
    throw PieceLimitError("progression difference needs " +
                          std::to_string(classes) + " residue classes");
  std::vector<Prog> out;
  for (Coord r = 0; r < classes; ++r) {
    Coord first = checkedAdd(x.a, checkedMul(x.s, r));
    if (first > x.b) break;
    Coord last = first + ((x.b - first) / l) * l;
    if ((common->a - first) % l == 0) {
      // the class that meets y: keep the trims below and above the overlap
      if (common->a - l >= first) out.push_back({first, l, common->a - l});
      if (common->b + l <= last) out.push_back({common->b + l, l, last});
    } else {
      out.push_back({first, l, last});
    }
  }
  return out;
}

} // namespace detail

std::optional<MDInterval> MDInterval::make(std::vector<Coord> start,
                                           std::vector<Coord> step,
                                           std::vector<Coord> end) {
  if (start.empty() || start.size() != step.size() ||
      start.size() != end.size())
    throw DimensionError("interval needs matching nonempty start/step/end");
  for (std::size_t j = 0; j < start.size(); ++j) {
    if (step[j] < 1)
      throw Error("interval step must be >= 1, got " +
                  std::to_string(step[j]));
    if (start[j] < 0)
      throw Error("interval coordinates are naturals, got start " +
                  std::to_string(start[j]));
    if (start[j] > end[j]) return std::nullopt;
    end[j] = start[j] + ((end[j] - start[j]) / step[j]) * step[j];
    if (start[j] == end[j]) step[j] = 1;
  }
  MDInterval r;
  r.start_ = std::move(start);
  r.step_ = std::move(step);
  r.end_ = std::move(end);
  return r;
}

std::optional<MDInterval> MDInterval::make(Coord a, Coord s, Coord b) {
  return make(std::vector<Coord>{a}, std::vector<Coord>{s},
              std::vector<Coord>{b});
}

MDInterval MDInterval::point(const Point& p) {
  auto r = make(p, std::vector<Coord>(p.size(), 1), p);
  if (!r) throw Error("invalid point interval");
  return *r;
}

unsigned long long MDInterval::cardinality() const {
  unsigned long long n = 1;
  for (int j = 0; j < dim(); ++j)
    n = checkedMulU(n, static_cast<unsigned long long>(
                           (end_[j] - start_[j]) / step_[j] + 1));
  return n;
}

bool MDInterval::contains(const Point& p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (p[j] < start_[j] || p[j] > end_[j]) return false;
    if ((p[j] - start_[j]) % step_[j] != 0) return false;
  }
  return true;
}

bool MDInterval::isSingleton() const { return start_ == end_; }

std::optional<MDInterval> MDInterval::intersect(const MDInterval& a,
                                                const MDInterval& b) {
  if (a.dim() != b.dim())
    throw DimensionError("intersect: dimension mismatch");
  std::vector<Coord> start(a.dim()), step(a.dim()), end(a.dim());
  for (int j = 0; j < a.dim(); ++j) {
    auto p = detail::intersectProg({a.start_[j], a.step_[j], a.end_[j]},
                                   {b.start_[j], b.step_[j], b.end_[j]});
    if (!p) return std::nullopt;
    start[j] = p->a;
    step[j] = p->s;
    end[j] = p->b;
  }
  return make(std::move(start), std::move(step), std::move(end));
}

std::string MDInterval::str() const {
  std::ostringstream os;
  for (int j = 0; j < dim(); ++j) {
    if (j) os << 'x';
    os << '[' << start_[j] << ':' << step_[j] << ':' << end_[j] << ']';
  }
  return os.str();
}

} // namespace sbg
