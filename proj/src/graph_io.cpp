#include "sbg/graph_io.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace sbg {

namespace {

struct Tok {
  std::string s;
  int col = 1;
};

// Splits one line into tokens. A '{...}' chunk is kept whole (spaces are
// allowed inside set literals), as is a '[...]' chunk; everything else
// breaks on blanks.
std::vector<Tok> tokenizeLine(const std::string& line, int lineNo) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
    int col = static_cast<int>(i) + 1;
    if (c == '{' || c == '[') {
      char close = (c == '{') ? '}' : ']';
      std::size_t j = line.find(close, i);
      if (j == std::string::npos)
        throw ParseError(std::string("missing '") + close + "'", lineNo, col);
      out.push_back({line.substr(i, j - i + 1), col});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
             line[j] != '\r' && line[j] != '{' && line[j] != '[')
        ++j;
      out.push_back({line.substr(i, j - i), col});
      i = j;
    }
  }
  return out;
}

Coord parseCoord(const std::string& s, int line, int col) {
  if (s.empty()) throw ParseError("expected a number", line, col);
  errno = 0;
  char* endp = nullptr;
  long long v = std::strtoll(s.c_str(), &endp, 10);
  if (errno == ERANGE) throw ParseError("number out of range: " + s, line, col);
  if (endp != s.c_str() + s.size())
    throw ParseError("bad number '" + s + "'", line, col);
  return v;
}

Rat parseRat(const std::string& s, int line, int col) {
  std::size_t slash = s.find('/');
  if (slash == std::string::npos) return Rat(parseCoord(s, line, col));
  Coord num = parseCoord(s.substr(0, slash), line, col);
  Coord den = parseCoord(s.substr(slash + 1), line, col);
  if (den == 0) throw ParseError("zero denominator in '" + s + "'", line, col);
  return Rat(num, den);
}

// "[r;r;...]" -> rationals; the token arrives with its brackets.
std::vector<Rat> parseRatList(const Tok& t, int line) {
  if (t.s.size() < 2 || t.s.front() != '[' || t.s.back() != ']')
    throw ParseError("expected a bracketed list, got '" + t.s + "'", line, t.col);
  std::vector<Rat> out;
  std::string inner = t.s.substr(1, t.s.size() - 2);
  std::size_t pos = 0;
  while (true) {
    std::size_t semi = inner.find(';', pos);
    std::string item = inner.substr(pos, semi == std::string::npos
                                             ? std::string::npos
                                             : semi - pos);
    std::size_t a = item.find_first_not_of(" \t");
    std::size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw ParseError("empty entry in list '" + t.s + "'", line, t.col);
    out.push_back(parseRat(item.substr(a, b - a + 1), line, t.col));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return out;
}

// "[a:s:b]x[c:t:d]" (already stripped of braces/commas) -> one box.
MDInterval parseBox(const std::string& s, int line, int col) {
  std::vector<Coord> start, step, end;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '[')
      throw ParseError("expected '[' in '" + s + "'", line, col);
    std::size_t j = s.find(']', i);
    if (j == std::string::npos)
      throw ParseError("missing ']' in '" + s + "'", line, col);
    std::string iv = s.substr(i + 1, j - i - 1);
    std::size_t c1 = iv.find(':');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                             : iv.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        iv.find(':', c2 + 1) != std::string::npos)
      throw ParseError("interval must be [start:step:end], got [" + iv + "]",
                       line, col);
    start.push_back(parseCoord(iv.substr(0, c1), line, col));
    step.push_back(parseCoord(iv.substr(c1 + 1, c2 - c1 - 1), line, col));
    end.push_back(parseCoord(iv.substr(c2 + 1), line, col));
    i = j + 1;
    if (i < s.size()) {
      if (s[i] != 'x')
        throw ParseError("expected 'x' between intervals in '" + s + "'",
                         line, col);
      ++i;
    }
  }
  if (start.empty())
    throw ParseError("empty box literal", line, col);
  auto box = MDInterval::make(std::move(start), std::move(step), std::move(end));
  if (!box)
    throw ParseError("interval '" + s + "' is empty or has a bad step",
                     line, col);
  return *box;
}

// "{box, box, ...}"; "{}" is the empty set.
IntervalSet parseSetLit(const Tok& t, int dim, int line) {
  if (t.s.size() < 2 || t.s.front() != '{' || t.s.back() != '}')
    throw ParseError("expected a set literal '{...}', got '" + t.s + "'",
                     line, t.col);
  std::string inner = t.s.substr(1, t.s.size() - 2);
  std::vector<MDInterval> boxes;
  std::size_t pos = 0;
  while (pos < inner.size()) {
    std::size_t comma = inner.find(',', pos);
    std::string item = inner.substr(pos, comma == std::string::npos
                                             ? std::string::npos
                                             : comma - pos);
    std::size_t a = item.find_first_not_of(" \t");
    if (a != std::string::npos) {
      std::size_t b = item.find_last_not_of(" \t");
      MDInterval box = parseBox(item.substr(a, b - a + 1), line, t.col);
      if (box.dim() != dim)
        throw ParseError("box has " + std::to_string(box.dim()) +
                             " dimensions, the graph has " + std::to_string(dim),
                         line, t.col);
      boxes.push_back(std::move(box));
    } else if (comma != std::string::npos) {
      throw ParseError("empty entry in set literal", line, t.col);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return IntervalSet::fromPieces(dim, boxes);
}

void expectWord(const std::vector<Tok>& toks, std::size_t idx,
                const std::string& word, int line) {
  if (idx >= toks.size())
    throw ParseError("expected '" + word + "' before end of line", line,
                     toks.empty() ? 1 : toks.back().col);
  if (toks[idx].s != word)
    throw ParseError("expected '" + word + "', got '" + toks[idx].s + "'",
                     line, toks[idx].col);
}

AffineFn parseFn(const std::vector<Tok>& toks, std::size_t idx, int dim,
                 int line) {
  expectWord(toks, idx + 1, "gain", line);
  expectWord(toks, idx + 3, "off", line);
  if (idx + 4 >= toks.size())
    throw ParseError("truncated map description", line, toks.back().col);
  AffineFn fn{parseRatList(toks[idx + 2], line), parseRatList(toks[idx + 4], line)};
  if (static_cast<int>(fn.gain.size()) != dim ||
      static_cast<int>(fn.offset.size()) != dim)
    throw ParseError("map lists need " + std::to_string(dim) + " entries",
                     line, toks[idx + 2].col);
  return fn;
}

// One edge restated as rows over a common refinement of both maps'
// piece domains, so each row carries a single (f1, f2) pair.
struct EdgeRow {
  IntervalSet dom{1};
  AffineFn f1;
  AffineFn f2;
};

std::vector<EdgeRow> refineEdge(const SetEdge& e) {
  std::vector<EdgeRow> rows;
  for (const auto& p1 : e.map1.pieces())
    for (const auto& p2 : e.map2.pieces()) {
      IntervalSet common = setIntersection(p1.dom, p2.dom);
      if (!common.empty()) rows.push_back({std::move(common), p1.fn, p2.fn});
    }
  return rows;
}

} // namespace

SBGraph parseGraphFile(const std::string& text) {
  SBGraph g;
  bool sawAnything = false;
  bool dimSet = false;

  // The edge being filled in, if any.
  bool inEdge = false;
  int edgeLine = 0;
  SetEdge edge;
  std::vector<PWLMap::Piece> pieces1, pieces2;

  auto findVertex = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
      if (g.vertices[i].name == name) return i;
    throw ModelError("edge " + edge.name + ": unknown vertex '" + name + "'");
  };

  auto finishEdge = [&](int line) {
    if (pieces1.empty())
      throw ParseError("edge " + edge.name + " has no pieces", line, 1);
    try {
      edge.map1 = PWLMap::fromPieces(g.dim, std::move(pieces1));
      edge.map2 = PWLMap::fromPieces(g.dim, std::move(pieces2));
      g.addEdge(std::move(edge));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      throw ModelError("edge at line " + std::to_string(edgeLine) + ": " +
                       err.what());
    }
    pieces1.clear();
    pieces2.clear();
    inEdge = false;
  };

  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<Tok> toks = tokenizeLine(line, lineNo);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].s;

    if (kw == "dim") {
      if (sawAnything)
        throw ParseError("dim must be the first statement", lineNo, toks[0].col);
      if (dimSet)
        throw ParseError("dim given twice", lineNo, toks[0].col);
      if (toks.size() != 2)
        throw ParseError("usage: dim N", lineNo, toks[0].col);
      Coord d = parseCoord(toks[1].s, lineNo, toks[1].col);
      if (d < 1 || d > 16)
        throw ParseError("dim must be between 1 and 16", lineNo, toks[1].col);
      g.dim = static_cast<int>(d);
      dimSet = true;
      sawAnything = true;
    } else if (kw == "vertex") {
      if (inEdge)
        throw ParseError("vertex inside an edge block", lineNo, toks[0].col);
      if (toks.size() != 3)
        throw ParseError("usage: vertex NAME {set}", lineNo, toks[0].col);
      sawAnything = true;
      for (const auto& v : g.vertices)
        if (v.name == toks[1].s)
          throw ModelError("vertex " + toks[1].s + " declared twice");
      IntervalSet set = parseSetLit(toks[2], g.dim, lineNo);
      if (set.empty())
        throw ModelError("vertex " + toks[1].s + " has an empty set");
      g.addVertex(toks[1].s, std::move(set));
    } else if (kw == "edge") {
      if (inEdge)
        throw ParseError("edge blocks do not nest; missing 'end'?", lineNo,
                         toks[0].col);
      if (toks.size() != 4)
        throw ParseError("usage: edge NAME V1 V2", lineNo, toks[0].col);
      sawAnything = true;
      inEdge = true;
      edgeLine = lineNo;
      edge = SetEdge{};
      edge.name = toks[1].s;
      edge.index1 = findVertex(toks[2].s);
      edge.index2 = findVertex(toks[3].s);
    } else if (kw == "piece") {
      if (!inEdge)
        throw ParseError("piece outside an edge block", lineNo, toks[0].col);
      // piece dom {set} map1 gain [..] off [..] map2 gain [..] off [..]
      expectWord(toks, 1, "dom", lineNo);
      if (toks.size() < 3)
        throw ParseError("missing piece domain", lineNo, toks.back().col);
      IntervalSet dom = parseSetLit(toks[2], g.dim, lineNo);
      if (dom.empty())
        throw ParseError("piece domain is empty", lineNo, toks[2].col);
      expectWord(toks, 3, "map1", lineNo);
      AffineFn f1 = parseFn(toks, 3, g.dim, lineNo);
      expectWord(toks, 8, "map2", lineNo);
      AffineFn f2 = parseFn(toks, 8, g.dim, lineNo);
      if (toks.size() > 13)
        throw ParseError("trailing tokens after piece", lineNo, toks[13].col);
      pieces1.push_back({dom, std::move(f1)});
      pieces2.push_back({std::move(dom), std::move(f2)});
    } else if (kw == "end") {
      if (!inEdge)
        throw ParseError("'end' without an open edge block", lineNo,
                         toks[0].col);
      if (toks.size() != 1)
        throw ParseError("trailing tokens after 'end'", lineNo, toks[1].col);
      finishEdge(lineNo);
    } else {
      throw ParseError("unknown statement '" + kw + "'", lineNo, toks[0].col);
    }
  }
  if (inEdge)
    throw ParseError("file ends inside edge " + edge.name + "; missing 'end'",
                     lineNo + 1, 1);
  return g;
}

std::string printGraphFile(const SBGraph& g) {
  std::ostringstream os;
  os << "dim " << g.dim << "\n";
  for (const auto& v : g.vertices)
    os << "vertex " << v.name << " " << v.set.str() << "\n";
  auto list = [&](const std::vector<Rat>& rs) {
    os << '[';
    for (std::size_t j = 0; j < rs.size(); ++j) {
      if (j) os << ';';
      os << ratStr(rs[j]);
    }
    os << ']';
  };
  for (const auto& e : g.edges) {
    os << "edge " << e.name << " " << g.vertices[e.index1].name << " "
       << g.vertices[e.index2].name << "\n";
    for (const auto& row : refineEdge(e)) {
      os << "piece dom " << row.dom.str() << " map1 gain ";
      list(row.f1.gain);
      os << " off ";
      list(row.f1.offset);
      os << " map2 gain ";
      list(row.f2.gain);
      os << " off ";
      list(row.f2.offset);
      os << "\n";
    }
    os << "end\n";
  }
  return os.str();
}

std::string graphJson(const SBGraph& g) {
  using nlohmann::json;
  auto setJson = [](const IntervalSet& s) {
    json boxes = json::array();
    for (const auto& box : s.pieces()) {
      json b = json::array();
      for (int j = 0; j < box.dim(); ++j)
        b.push_back({box.start()[j], box.step()[j], box.end()[j]});
      boxes.push_back(std::move(b));
    }
    return boxes;
  };
  auto fnJson = [](const AffineFn& f) {
    json gain = json::array(), off = json::array();
    for (const auto& r : f.gain) gain.push_back(ratStr(r));
    for (const auto& r : f.offset) off.push_back(ratStr(r));
    return json{{"gain", std::move(gain)}, {"offset", std::move(off)}};
  };
  json doc;
  doc["dim"] = g.dim;
  doc["vertices"] = json::array();
  for (const auto& v : g.vertices)
    doc["vertices"].push_back({{"name", v.name}, {"set", setJson(v.set)}});
  doc["edges"] = json::array();
  for (const auto& e : g.edges) {
    json rows = json::array();
    for (const auto& row : refineEdge(e))
      rows.push_back({{"dom", setJson(row.dom)},
                      {"map1", fnJson(row.f1)},
                      {"map2", fnJson(row.f2)}});
    doc["edges"].push_back({{"name", e.name},
                            {"v1", g.vertices[e.index1].name},
                            {"v2", g.vertices[e.index2].name},
                            {"pieces", std::move(rows)}});
  }
  return doc.dump(2);
}

} // namespace sbg
