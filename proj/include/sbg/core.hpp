#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbg {

/// Coordinates are naturals; arithmetic on them is checked (overflow throws,
/// it never wraps).
using Coord = long long;
using Point = std::vector<Coord>;

/// Exact rational used for map gains and offsets.
using Rat = boost::rational<long long>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Mixed dimensions where equal dimensions are required.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// 64-bit coordinate arithmetic left the representable range.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// A set or map exceeded the configured piece ceiling.
class PieceLimitError : public Error {
public:
  using Error::Error;
};

/// Point outside a map's domain, min of an empty set, and similar misuse.
class DomainError : public Error {
public:
  using Error::Error;
};

/// An operation's stated precondition does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Syntax or scoping error in a text input; carries a location.
class ParseError : public Error {
public:
  ParseError(std::string msg, int line, int col)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line), col(col) {}
  int line;
  int col;
};

/// Semantic error while turning a parsed model into a graph.
class ModelError : public Error {
public:
  using Error::Error;
};

/// A model parameter was referenced but never given a value.
class UnboundParamError : public Error {
public:
  using Error::Error;
};

Coord checkedAdd(Coord a, Coord b);
Coord checkedSub(Coord a, Coord b);
Coord checkedMul(Coord a, Coord b);
unsigned long long checkedMulU(unsigned long long a, unsigned long long b);
unsigned long long checkedAddU(unsigned long long a, unsigned long long b);
Coord coordLcm(Coord a, Coord b);

/// g*x + o evaluated exactly; nullopt when the value is not an integer.
std::optional<Coord> ratApply(const Rat& g, const Rat& o, Coord x);

/// x with g*x + o == y, exactly; requires g != 0; nullopt when not an integer.
std::optional<Coord> ratSolve(const Rat& g, const Rat& o, Coord y);

bool ratIsInt(const Rat& r);
Coord ratFloor(const Rat& r);
Coord ratCeil(const Rat& r);
std::string ratStr(const Rat& r);

/// Process-wide ceiling on the number of pieces any set or map may hold.
std::size_t pieceLimit();
void setPieceLimit(std::size_t limit);

std::string pointStr(const Point& p);

} // namespace sbg
