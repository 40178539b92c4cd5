#include "sbg/core.hpp"

#include <atomic>
#include <limits>
#include <numeric>
#include <sstream>

namespace sbg {

namespace {

constexpr Coord kMax = std::numeric_limits<Coord>::max();

[[noreturn]] void overflow(const char* what) {
  throw OverflowError(std::string("coordinate overflow in ") + what);
}

Coord narrow(__int128 v, const char* what) {
  if (v > kMax || v < -static_cast<__int128>(kMax) - 1) overflow(what);
  return static_cast<Coord>(v);
}

std::atomic<std::size_t> gPieceLimit{10000};

} // namespace

Coord checkedAdd(Coord a, Coord b) {
  Coord r;
  if (__builtin_add_overflow(a, b, &r)) overflow("add");
  return r;
}

Coord checkedSub(Coord a, Coord b) {
  Coord r;
  if (__builtin_sub_overflow(a, b, &r)) overflow("sub");
  return r;
}

Coord checkedMul(Coord a, Coord b) {
  Coord r;
  if (__builtin_mul_overflow(a, b, &r)) overflow("mul");
  return r;
}

unsigned long long checkedMulU(unsigned long long a, unsigned long long b) {
  unsigned long long r;
  if (__builtin_mul_overflow(a, b, &r)) overflow("mul");
  return r;
}

unsigned long long checkedAddU(unsigned long long a, unsigned long long b) {
  unsigned long long r;
  if (__builtin_add_overflow(a, b, &r)) overflow("add");
  return r;
}

Coord coordLcm(Coord a, Coord b) {
  if (a == 0 || b == 0) return 0;
  Coord g = std::gcd(a, b);
  return checkedMul(a / g, b);
}

std::optional<Coord> ratApply(const Rat& g, const Rat& o, Coord x) {
  __int128 num = static_cast<__int128>(g.numerator()) * x * o.denominator() +
                 static_cast<__int128>(o.numerator()) * g.denominator();
  __int128 den = static_cast<__int128>(g.denominator()) * o.denominator();
  if (num % den != 0) return std::nullopt;
  return narrow(num / den, "affine apply");
}

std::optional<Coord> ratSolve(const Rat& g, const Rat& o, Coord y) {
  if (g.numerator() == 0) throw PreconditionError("ratSolve needs gain != 0");
  // x = (y - o) / g
  __int128 num = (static_cast<__int128>(y) * o.denominator() - o.numerator()) *
                 g.denominator();
  __int128 den = static_cast<__int128>(g.numerator()) * o.denominator();
  if (num % den != 0) return std::nullopt;
  return narrow(num / den, "affine solve");
}

bool ratIsInt(const Rat& r) { return r.denominator() == 1; }

Coord ratFloor(const Rat& r) {
  Coord q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

Coord ratCeil(const Rat& r) {
  Coord q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
  return q;
}

std::string ratStr(const Rat& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

std::size_t pieceLimit() { return gPieceLimit.load(); }

void setPieceLimit(std::size_t limit) {
  gPieceLimit.store(limit == 0 ? 1 : limit);
}

std::string pointStr(const Point& p) {
  std::ostringstream os;
  if (p.size() == 1) {
    os << p[0];
    return os.str();
  }
  os << '[';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ';';
    os << p[i];
  }
  os << ']';
  return os.str();
}

} // namespace sbg
