#pragma once

#include <map>
#include <string>
#include <vector>

#include "sbg/core.hpp"

namespace sbg {

using Params = std::map<std::string, Coord>;

/// Integer expression over model parameters: cst + Σ coef·param.
struct ParamExpr {
  Coord cst = 0;
  std::vector<std::pair<std::string, Coord>> terms;

  Coord eval(const Params& params) const; ///< throws UnboundParamError
  std::string str() const;
};

/// One index expression: coef·var + cst, where var is an iterator or a
/// parameter (empty var means a plain constant).
struct IndexAffine {
  Rat coef{0};
  std::string var;
  Coord cst = 0;
  int line = 0, col = 0;

  std::string str() const;
};

struct Ref {
  std::string base;
  std::string member;                ///< empty for undotted names
  std::vector<IndexAffine> indices;  ///< empty for scalar references
  int line = 0, col = 0;

  std::string connector() const {
    return member.empty() ? base : base + "." + member;
  }
};

struct Connect {
  Ref a, b;
  int line = 0, col = 0;
};

struct Iterator {
  std::string name;
  ParamExpr lo, hi;
  int line = 0, col = 0;
};

struct Stmt {
  enum class Kind { Connect, For };
  Kind kind = Kind::Connect;
  Connect conn;                 ///< Kind::Connect
  std::vector<Iterator> iters;  ///< Kind::For
  std::vector<Stmt> body;       ///< Kind::For
};

/// `R.p[N];` pins a connector (and its numbering position) explicitly;
/// `R[N];` declares a base whose members inherit the extents and enter
/// the numbering at first use.
struct ConnectorDecl {
  std::string name;
  bool dotted = false;
  std::vector<ParamExpr> extents; ///< empty for scalars / plain bases
  int line = 0, col = 0;
};

struct ConnectModel {
  std::vector<ConnectorDecl> decls;
  std::vector<Stmt> stmts;
};

/// Throws ParseError with line/column on syntax errors and on loop
/// ranges that depend on an enclosing iterator.
ConnectModel parseModel(const std::string& text);

} // namespace sbg
