#include "sbg/connect_model.hpp"

#include <cctype>
#include <limits>
#include <set>
#include <sstream>

namespace sbg {

Coord ParamExpr::eval(const Params& params) const {
  Coord v = cst;
  for (const auto& [name, coef] : terms) {
    auto it = params.find(name);
    if (it == params.end())
      throw UnboundParamError("parameter " + name + " is not bound");
    v = checkedAdd(v, checkedMul(coef, it->second));
  }
  return v;
}

std::string ParamExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, coef] : terms) {
    if (!first && coef >= 0) os << "+";
    if (coef == -1)
      os << "-";
    else if (coef != 1)
      os << coef << "*";
    os << name;
    first = false;
  }
  if (first)
    os << cst;
  else if (cst > 0)
    os << "+" << cst;
  else if (cst < 0)
    os << cst;
  return os.str();
}

std::string IndexAffine::str() const {
  if (var.empty()) return std::to_string(cst);
  std::ostringstream os;
  if (coef != Rat(1)) os << ratStr(coef) << "*";
  os << var;
  if (cst > 0) os << "+" << cst;
  if (cst < 0) os << cst;
  return os.str();
}

namespace {

enum class Tok {
  Ident,
  Int,
  KwConnect,
  KwFor,
  KwIn,
  KwLoop,
  KwEnd,
  Semi,
  Comma,
  LParen,
  RParen,
  LBrack,
  RBrack,
  Colon,
  Dot,
  Star,
  Plus,
  Minus,
  Slash,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  Coord value = 0;
  int line = 1, col = 1;
};

const char* tokName(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwConnect: return "'connect'";
    case Tok::KwFor: return "'for'";
    case Tok::KwIn: return "'in'";
    case Tok::KwLoop: return "'loop'";
    case Tok::KwEnd: return "'end'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Star: return "'*'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Slash: return "'/'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        id += take();
      t.text = id;
      if (id == "connect") t.kind = Tok::KwConnect;
      else if (id == "for") t.kind = Tok::KwFor;
      else if (id == "in") t.kind = Tok::KwIn;
      else if (id == "loop") t.kind = Tok::KwLoop;
      else if (id == "end") t.kind = Tok::KwEnd;
      else t.kind = Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Coord v = 0;
      std::string digits;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        char d = take();
        digits += d;
        if (v > (std::numeric_limits<Coord>::max() - (d - '0')) / 10)
          throw ParseError("integer literal too large", t.line, t.col);
        v = v * 10 + (d - '0');
      }
      t.kind = Tok::Int;
      t.text = digits;
      t.value = v;
      return t;
    }
    take();
    switch (c) {
      case ';': t.kind = Tok::Semi; break;
      case ',': t.kind = Tok::Comma; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '[': t.kind = Tok::LBrack; break;
      case ']': t.kind = Tok::RBrack; break;
      case ':': t.kind = Tok::Colon; break;
      case '.': t.kind = Tok::Dot; break;
      case '*': t.kind = Tok::Star; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '/': t.kind = Tok::Slash; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         t.line, t.col);
    }
    t.text = std::string(1, c);
    return t;
  }

private:
  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
public:
  explicit Parser(const std::string& text) : lex_(text) { cur_ = lex_.next(); }

  ConnectModel model() {
    ConnectModel m;
    while (cur_.kind == Tok::Ident) m.decls.push_back(decl());
    while (cur_.kind != Tok::Eof) m.stmts.push_back(stmt());
    return m;
  }

private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(msg, t.line, t.col);
  }

  Token expect(Tok k) {
    if (cur_.kind != k)
      fail(cur_, std::string("expected ") + tokName(k) + ", found " +
                     tokName(cur_.kind));
    Token t = cur_;
    cur_ = lex_.next();
    return t;
  }

  bool accept(Tok k) {
    if (cur_.kind != k) return false;
    cur_ = lex_.next();
    return true;
  }

  ConnectorDecl decl() {
    ConnectorDecl d;
    Token name = expect(Tok::Ident);
    d.line = name.line;
    d.col = name.col;
    d.name = name.text;
    if (accept(Tok::Dot)) {
      d.name += "." + expect(Tok::Ident).text;
      d.dotted = true;
    }
    if (accept(Tok::LBrack)) {
      d.extents.push_back(boundExpr({}));
      while (accept(Tok::Comma)) d.extents.push_back(boundExpr({}));
      expect(Tok::RBrack);
    }
    expect(Tok::Semi);
    return d;
  }

  Stmt stmt(const std::set<std::string>& scope = {}) {
    if (cur_.kind == Tok::KwConnect) return connectStmt();
    if (cur_.kind == Tok::KwFor) return forStmt(scope);
    fail(cur_, std::string("expected 'connect' or 'for', found ") +
                   tokName(cur_.kind));
  }

  Stmt connectStmt() {
    Stmt s;
    s.kind = Stmt::Kind::Connect;
    Token kw = expect(Tok::KwConnect);
    s.conn.line = kw.line;
    s.conn.col = kw.col;
    expect(Tok::LParen);
    s.conn.a = ref();
    expect(Tok::Comma);
    s.conn.b = ref();
    expect(Tok::RParen);
    expect(Tok::Semi);
    return s;
  }

  Stmt forStmt(std::set<std::string> scope) {
    Stmt s;
    s.kind = Stmt::Kind::For;
    expect(Tok::KwFor);
    s.iters.push_back(iterator(scope));
    while (accept(Tok::Comma)) s.iters.push_back(iterator(scope));
    expect(Tok::KwLoop);
    while (cur_.kind != Tok::KwEnd) s.body.push_back(stmt(scope));
    expect(Tok::KwEnd);
    expect(Tok::KwFor);
    expect(Tok::Semi);
    return s;
  }

  // Registers the iterator's name in the caller's scope before parsing its
  // bounds, so both self-referential and sibling-referential ranges are
  // rejected.
  Iterator iterator(std::set<std::string>& scope) {
    Iterator it;
    Token name = expect(Tok::Ident);
    it.name = name.text;
    it.line = name.line;
    it.col = name.col;
    scope.insert(it.name);
    expect(Tok::KwIn);
    it.lo = boundExpr(scope);
    expect(Tok::Colon);
    it.hi = boundExpr(scope);
    return it;
  }

  // Integer expression over parameters only; referencing an in-scope
  // iterator is the nested-range violation and is rejected here.
  ParamExpr boundExpr(const std::set<std::string>& scope) {
    ParamExpr e;
    Coord sign = 1;
    if (accept(Tok::Minus)) sign = -1;
    boundTerm(e, sign, scope);
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      sign = cur_.kind == Tok::Plus ? 1 : -1;
      cur_ = lex_.next();
      boundTerm(e, sign, scope);
    }
    return e;
  }

  void boundTerm(ParamExpr& e, Coord sign, const std::set<std::string>& scope) {
    if (cur_.kind == Tok::Int) {
      Token n = expect(Tok::Int);
      if (accept(Tok::Star)) {
        Token id = expect(Tok::Ident);
        checkNotIterator(id, scope);
        e.terms.emplace_back(id.text, checkedMul(sign, n.value));
      } else {
        e.cst = checkedAdd(e.cst, checkedMul(sign, n.value));
      }
      return;
    }
    if (cur_.kind == Tok::Ident) {
      Token id = expect(Tok::Ident);
      checkNotIterator(id, scope);
      Coord coef = sign;
      if (accept(Tok::Star)) coef = checkedMul(sign, expect(Tok::Int).value);
      e.terms.emplace_back(id.text, coef);
      return;
    }
    fail(cur_, std::string("expected integer or parameter, found ") +
                   tokName(cur_.kind));
  }

  void checkNotIterator(const Token& id, const std::set<std::string>& scope) {
    if (scope.count(id.text))
      fail(id, "loop range depends on iterator '" + id.text +
                   "'; iterator ranges must be independent");
  }

  Ref ref() {
    Ref r;
    Token base = expect(Tok::Ident);
    r.base = base.text;
    r.line = base.line;
    r.col = base.col;
    bool indexed = false;
    if (cur_.kind == Tok::LBrack) {
      indexGroup(r);
      indexed = true;
    }
    if (accept(Tok::Dot)) {
      r.member = expect(Tok::Ident).text;
      if (cur_.kind == Tok::LBrack) {
        if (indexed) fail(cur_, "reference has two index groups");
        indexGroup(r);
      }
    }
    return r;
  }

  void indexGroup(Ref& r) {
    expect(Tok::LBrack);
    r.indices.push_back(affine());
    while (accept(Tok::Comma)) r.indices.push_back(affine());
    expect(Tok::RBrack);
  }

  // coef*var+cst | var+cst | var | [-]cst
  IndexAffine affine() {
    IndexAffine a;
    a.line = cur_.line;
    a.col = cur_.col;
    if (cur_.kind == Tok::Minus || cur_.kind == Tok::Int) {
      Coord sign = accept(Tok::Minus) ? -1 : 1;
      Token n = expect(Tok::Int);
      Coord num = checkedMul(sign, n.value);
      if (accept(Tok::Slash)) {
        Token den = expect(Tok::Int);
        if (den.value == 0) fail(den, "zero denominator");
        a.coef = Rat(num, den.value);
        expect(Tok::Star);
        a.var = expect(Tok::Ident).text;
      } else if (accept(Tok::Star)) {
        a.coef = Rat(num);
        a.var = expect(Tok::Ident).text;
      } else {
        a.cst = num;
        return a;
      }
    } else {
      Token id = expect(Tok::Ident);
      a.coef = Rat(1);
      a.var = id.text;
    }
    if (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      Coord sign = cur_.kind == Tok::Plus ? 1 : -1;
      cur_ = lex_.next();
      a.cst = checkedMul(sign, expect(Tok::Int).value);
    }
    return a;
  }

  Lexer lex_;
  Token cur_;
};

} // namespace

ConnectModel parseModel(const std::string& text) {
  return Parser(text).model();
}

} // namespace sbg
