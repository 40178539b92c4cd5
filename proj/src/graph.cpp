#include "sbg/graph.hpp"

#include <optional>
#include <set>
#include <sstream>
#include <utility>

namespace sbg {

std::size_t SBGraph::addVertex(std::string name, IntervalSet set) {
  if (set.dim() != dim)
    throw DimensionError("vertex " + name + " has dimension " +
                         std::to_string(set.dim()) + ", graph has " +
                         std::to_string(dim));
  vertices.push_back(SetVertex{std::move(name), std::move(set)});
  return vertices.size() - 1;
}

void SBGraph::addEdge(SetEdge e) {
  if (e.index1 >= vertices.size() || e.index2 >= vertices.size())
    throw ModelError("edge " + e.name + " references a missing vertex");
  if (e.map1.dim() != dim || e.map2.dim() != dim)
    throw DimensionError("edge " + e.name + " has maps of wrong dimension");
  edges.push_back(std::move(e));
}

std::string ValidationReport::str() const {
  if (issues.empty()) return "ok";
  std::ostringstream os;
  for (const auto& i : issues) os << i.where << ": " << i.what << "\n";
  return os.str();
}

namespace {

// Region of box where both affine functions agree pointwise: per
// dimension the whole progression (identical components), a single
// root, or nothing.
std::optional<MDInterval> equalRegion(const AffineFn& f1, const AffineFn& f2,
                                      const MDInterval& box) {
  int d = box.dim();
  std::vector<Coord> a(d), s(d), b(d);
  for (int j = 0; j < d; ++j) {
    Rat dg = f1.gain[j] - f2.gain[j];
    Rat doff = f2.offset[j] - f1.offset[j];
    if (dg == Rat(0)) {
      if (doff != Rat(0)) return std::nullopt;
      a[j] = box.start()[j];
      s[j] = box.step()[j];
      b[j] = box.end()[j];
    } else {
      Rat x = doff / dg;
      if (!ratIsInt(x)) return std::nullopt;
      Coord xc = x.numerator();
      if (xc < box.start()[j] || xc > box.end()[j]) return std::nullopt;
      if ((xc - box.start()[j]) % box.step()[j] != 0) return std::nullopt;
      a[j] = xc;
      s[j] = 1;
      b[j] = xc;
    }
  }
  return MDInterval::make(std::move(a), std::move(s), std::move(b));
}

} // namespace

ValidationReport validate(const SBGraph& g) {
  ValidationReport rep;
  auto issue = [&](std::string where, std::string what) {
    rep.issues.push_back(ValidationIssue{std::move(where), std::move(what)});
  };

  std::set<std::string> names;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const SetVertex& v = g.vertices[i];
    std::string where = "vertex " + v.name;
    if (!names.insert(v.name).second) issue(where, "duplicate vertex name");
    if (v.set.dim() != g.dim) {
      issue(where, "dimension mismatch");
      continue;
    }
    if (v.set.empty()) issue(where, "empty vertex set");
    for (std::size_t j = 0; j < i; ++j) {
      if (g.vertices[j].set.dim() != g.dim) continue;
      IntervalSet common = setIntersection(g.vertices[j].set, v.set);
      if (!common.empty())
        issue(where, "overlaps vertex " + g.vertices[j].name + " on " +
                         common.str());
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const SetEdge& e = g.edges[ei];
    std::string where =
        "edge " + (e.name.empty() ? std::to_string(ei) : e.name);
    if (e.index1 >= g.vertices.size() || e.index2 >= g.vertices.size()) {
      issue(where, "incident vertex out of range");
      continue;
    }
    if (e.map1.dim() != g.dim || e.map2.dim() != g.dim) {
      issue(where, "map dimension mismatch");
      continue;
    }
    IntervalSet dom1 = e.map1.wholeDomain();
    IntervalSet dom2 = e.map2.wholeDomain();
    if (!setEquals(dom1, dom2)) issue(where, "side maps have different domains");
    if (dom1.empty() && dom2.empty()) issue(where, "empty edge set");
    if (!setMinus(e.map1.image(), g.vertices[e.index1].set).empty())
      issue(where, "side-1 image escapes vertex " + g.vertices[e.index1].name);
    if (!setMinus(e.map2.image(), g.vertices[e.index2].set).empty())
      issue(where, "side-2 image escapes vertex " + g.vertices[e.index2].name);

    auto key = std::minmax(e.index1, e.index2);
    if (!pairs.insert({key.first, key.second}).second)
      issue(where, "duplicate set-edge between " + g.vertices[e.index1].name +
                       " and " + g.vertices[e.index2].name);

    for (const auto& p1 : e.map1.pieces()) {
      for (const auto& p2 : e.map2.pieces()) {
        IntervalSet common = setIntersection(p1.dom, p2.dom);
        for (const MDInterval& box : common.pieces()) {
          for (int d = 0; d < g.dim; ++d) {
            const Rat& g1 = p1.fn.gain[d];
            const Rat& g2 = p2.fn.gain[d];
            if (g1 != Rat(0) && g2 != Rat(0) && g1 != g2)
              issue(where, "side maps scale dimension " + std::to_string(d + 1) +
                               " differently on " + box.str());
          }
          if (e.index1 == e.index2) {
            if (auto eq = equalRegion(p1.fn, p2.fn, box))
              issue(where, "connects elements of " +
                               g.vertices[e.index1].name +
                               " to themselves on " + eq->str());
          }
        }
      }
    }
  }
  return rep;
}

namespace {

Coord pow10Above(Coord x) {
  Coord p = 1;
  while (p <= x) p = checkedMul(p, 10);
  return p;
}

// Translate every domain box by shift, compensating offsets so values
// are unchanged.
void appendShifted(const PWLMap& m, const std::vector<Coord>& shift,
                   std::vector<PWLMap::Piece>& out) {
  int d = m.dim();
  for (const auto& p : m.pieces()) {
    std::vector<MDInterval> boxes;
    boxes.reserve(p.dom.pieces().size());
    for (const MDInterval& box : p.dom.pieces()) {
      std::vector<Coord> a(d), s(d), b(d);
      for (int j = 0; j < d; ++j) {
        a[j] = checkedAdd(box.start()[j], shift[j]);
        s[j] = box.step()[j];
        b[j] = checkedAdd(box.end()[j], shift[j]);
      }
      boxes.push_back(*MDInterval::make(std::move(a), std::move(s), std::move(b)));
    }
    AffineFn fn = p.fn;
    for (int j = 0; j < d; ++j) fn.offset[j] -= fn.gain[j] * Rat(shift[j]);
    out.push_back(
        PWLMap::Piece{IntervalSet::fromPieces(d, boxes), std::move(fn)});
  }
}

} // namespace

EdgeMaps edgeMaps(const SBGraph& g) {
  EdgeMaps out{PWLMap(g.dim), PWLMap(g.dim)};
  if (g.edges.empty()) return out;

  std::vector<Coord> maxEnd(g.dim, 0);
  for (const SetEdge& e : g.edges) {
    IntervalSet dom = e.map1.wholeDomain();
    for (const MDInterval& box : dom.pieces())
      for (int j = 0; j < g.dim; ++j)
        maxEnd[j] = std::max(maxEnd[j], box.end()[j]);
  }

  std::vector<Coord> block(g.dim);
  for (int j = 0; j < g.dim; ++j) block[j] = pow10Above(maxEnd[j]);

  std::vector<PWLMap::Piece> ps1, ps2;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    std::vector<Coord> shift(g.dim);
    for (int j = 0; j < g.dim; ++j)
      shift[j] = checkedMul(static_cast<Coord>(i), block[j]);
    appendShifted(g.edges[i].map1, shift, ps1);
    appendShifted(g.edges[i].map2, shift, ps2);
  }
  out.emap1 = PWLMap::fromPieces(g.dim, std::move(ps1));
  out.emap2 = PWLMap::fromPieces(g.dim, std::move(ps2));
  return out;
}

ConnectResult connectComp(const SBGraph& g) {
  ConnectResult res{PWLMap(g.dim), ConnectStats{}};

  IntervalSet verts(g.dim);
  for (const SetVertex& v : g.vertices) verts = setUnion(verts, v.set);
  PWLMap rmap = PWLMap::identityOn(verts);
  if (verts.empty()) return res;

  EdgeMaps em = edgeMaps(g);

  IntervalSet prevImage(g.dim);
  IntervalSet curImage = rmap.image();
  bool changed = !setEquals(prevImage, curImage);
  while (changed) {
    ++res.stats.passes;
    PWLMap next = rmap;
    if (!g.edges.empty()) {
      PWLMap er1 = compose(rmap, em.emap1);
      PWLMap er2 = compose(rmap, em.emap2);
      next = minMap(rmap, minAdjMap(er1, er2), minAdjMap(er2, er1));
    }
    prevImage = std::move(curImage);
    rmap = mapInf(next);
    res.stats.rmapPieces.push_back(rmap.pieces().size());
    curImage = rmap.image();
    changed = !setEquals(prevImage, curImage);
    if (changed) ++res.stats.iterations;
  }
  res.stats.finalPieces = rmap.pieces().size();
  res.rmap = std::move(rmap);
  return res;
}

} // namespace sbg
