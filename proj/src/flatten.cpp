#include "sbg/flatten.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace sbg {

namespace {

std::string loc(int line, int col) {
  return std::to_string(line) + ":" + std::to_string(col);
}

Coord evalExpr(const ParamExpr& e, const Params& params, int line, int col) {
  try {
    return e.eval(params);
  } catch (const UnboundParamError& err) {
    throw UnboundParamError(loc(line, col) + ": " + err.what());
  }
}

/// Smallest power of ten >= max(x, 1).
Coord pow10AtLeast(Coord x) {
  Coord p = 1;
  while (p < x) p = checkedMul(p, 10);
  return p;
}

/// Smallest power of ten > max(x, 0).
Coord pow10Above(Coord x) {
  Coord p = 1;
  while (p <= x) p = checkedMul(p, 10);
  return p;
}

struct BoundIter {
  std::string name;
  Coord lo = 0, hi = 0;
};

/// One connect statement together with its evaluated loop nest.
struct Instance {
  const Connect* conn = nullptr;
  std::vector<BoundIter> iters;
  bool empty = false; ///< some enclosing range has lo > hi
};

void collect(const std::vector<Stmt>& stmts, const Params& params,
             std::vector<BoundIter>& iters, std::vector<Instance>& out) {
  for (const Stmt& s : stmts) {
    if (s.kind == Stmt::Kind::Connect) {
      Instance inst;
      inst.conn = &s.conn;
      inst.iters = iters;
      for (const BoundIter& it : iters)
        if (it.lo > it.hi) inst.empty = true;
      out.push_back(std::move(inst));
    } else {
      std::size_t mark = iters.size();
      for (const Iterator& it : s.iters) {
        BoundIter b;
        b.name = it.name;
        b.lo = evalExpr(it.lo, params, it.line, it.col);
        b.hi = evalExpr(it.hi, params, it.line, it.col);
        iters.push_back(std::move(b));
      }
      collect(s.body, params, iters, out);
      iters.resize(mark);
    }
  }
}

/// Innermost binding wins when a name is reused in nested loops.
const BoundIter* findIter(const std::vector<BoundIter>& iters,
                          const std::string& name) {
  for (auto it = iters.rbegin(); it != iters.rend(); ++it)
    if (it->name == name) return &*it;
  return nullptr;
}

/// Facts gathered about one connector from the statements.
struct Discovered {
  int dims = 0;
  std::vector<Coord> maxIdx; ///< per-dim maximum attained index
  bool attained = false;     ///< appears in a non-empty instance
  int line = 0, col = 0;     ///< first use
};

/// Resolved value range of one index expression over an instance.
struct IdxRange {
  Rat lo, hi;                 ///< attained endpoint values (lo <= hi)
  const BoundIter* it = nullptr; ///< non-null when driven by an iterator
};

IdxRange resolveIndex(const IndexAffine& ix, const Instance& inst,
                      const Params& params) {
  IdxRange r;
  if (ix.var.empty()) {
    r.lo = r.hi = Rat(ix.cst);
    return r;
  }
  if (const BoundIter* bi = findIter(inst.iters, ix.var)) {
    Rat a = ix.coef * Rat(bi->lo) + Rat(ix.cst);
    Rat b = ix.coef * Rat(bi->hi) + Rat(ix.cst);
    r.lo = std::min(a, b);
    r.hi = std::max(a, b);
    r.it = bi;
    return r;
  }
  auto pit = params.find(ix.var);
  if (pit == params.end())
    throw UnboundParamError(loc(ix.line, ix.col) + ": parameter " + ix.var +
                            " is not bound");
  r.lo = r.hi = ix.coef * Rat(pit->second) + Rat(ix.cst);
  return r;
}

void scanRef(const Ref& r, const Instance& inst, const Params& params,
             std::map<std::string, Discovered>& disc,
             std::vector<std::string>& order) {
  const std::string name = r.connector();
  auto [it, fresh] = disc.try_emplace(name);
  Discovered& d = it->second;
  if (fresh) {
    d.dims = static_cast<int>(r.indices.size());
    d.maxIdx.assign(r.indices.size(), 0);
    d.line = r.line;
    d.col = r.col;
    order.push_back(name);
  } else if (d.dims != static_cast<int>(r.indices.size())) {
    throw ModelError(loc(r.line, r.col) + ": connector " + name +
                     " is used with " + std::to_string(r.indices.size()) +
                     " index(es) but previously with " + std::to_string(d.dims));
  }
  if (inst.empty) return;
  d.attained = true;
  for (std::size_t j = 0; j < r.indices.size(); ++j) {
    IdxRange ir = resolveIndex(r.indices[j], inst, params);
    d.maxIdx[j] = std::max(d.maxIdx[j], ratFloor(ir.hi));
  }
}

} // namespace

const ConnectorInfo* VertexNumbering::find(const std::string& name) const {
  for (const ConnectorInfo& c : connectors)
    if (c.name == name) return &c;
  return nullptr;
}

VertexNumbering numberVertices(const ConnectModel& model, const Params& params) {
  // Declarations: exact-name connectors pin the order; a bare array decl
  // only hands its extents to members (and to bare use of the name).
  std::map<std::string, const ConnectorDecl*> declByName;
  std::map<std::string, const ConnectorDecl*> baseDecls;
  std::set<std::string> seen;
  for (const ConnectorDecl& d : model.decls) {
    if (!seen.insert(d.name).second)
      throw ModelError(loc(d.line, d.col) + ": " + d.name + " declared twice");
    if (d.dotted || d.extents.empty())
      declByName[d.name] = &d;
    else
      baseDecls[d.name] = &d;
  }

  std::vector<Instance> insts;
  std::vector<BoundIter> stack;
  collect(model.stmts, params, stack, insts);

  std::map<std::string, Discovered> disc;
  std::vector<std::string> useOrder;
  for (const Instance& inst : insts) {
    scanRef(inst.conn->a, inst, params, disc, useOrder);
    scanRef(inst.conn->b, inst, params, disc, useOrder);
  }

  // Global connector order: pinned declarations first, then first use.
  std::vector<std::string> order;
  std::set<std::string> placed;
  for (const ConnectorDecl& d : model.decls) {
    bool pinned = d.dotted || d.extents.empty() ||
                  disc.count(d.name) > 0; // bare array used bare
    if (pinned && placed.insert(d.name).second) order.push_back(d.name);
  }
  for (const std::string& name : useOrder)
    if (placed.insert(name).second) order.push_back(name);

  // Resolve each connector's extents.
  struct Resolved {
    std::string name;
    std::vector<Coord> extents; ///< natural dimensions (empty = scalar)
  };
  std::vector<Resolved> resolved;
  for (const std::string& name : order) {
    Resolved r;
    r.name = name;
    const Discovered* use = nullptr;
    if (auto it = disc.find(name); it != disc.end()) use = &it->second;

    const ConnectorDecl* exact = nullptr;
    if (auto it = declByName.find(name); it != declByName.end())
      exact = it->second;
    const ConnectorDecl* base = nullptr;
    if (!exact) {
      std::string stem = name.substr(0, name.find('.'));
      if (auto it = baseDecls.find(name); it != baseDecls.end())
        base = it->second; // bare array connector
      else if (auto bit = baseDecls.find(stem); bit != baseDecls.end())
        base = bit->second;
    }

    if (exact || base) {
      const ConnectorDecl* d = exact ? exact : base;
      for (const ParamExpr& e : d->extents)
        r.extents.push_back(evalExpr(e, params, d->line, d->col));
      for (std::size_t j = 0; j < r.extents.size(); ++j)
        if (r.extents[j] < 1)
          throw ModelError(loc(d->line, d->col) + ": connector " + name +
                           " has nonpositive extent " +
                           std::to_string(r.extents[j]));
      if (use && use->dims != static_cast<int>(r.extents.size()))
        throw ModelError(loc(use->line, use->col) + ": connector " + name +
                         " has " + std::to_string(r.extents.size()) +
                         " dimension(s) but is used with " +
                         std::to_string(use->dims) + " index(es)");
    } else {
      // No declaration: infer from use.
      if (use->dims > 0) {
        if (!use->attained)
          throw ModelError(loc(use->line, use->col) + ": cannot infer the"
                           " extent of connector " + name +
                           " (every use sits in an empty loop); declare it");
        r.extents = use->maxIdx;
        for (std::size_t j = 0; j < r.extents.size(); ++j)
          if (r.extents[j] < 1)
            throw ModelError(loc(use->line, use->col) + ": connector " + name +
                             " has nonpositive inferred extent " +
                             std::to_string(r.extents[j]));
      }
    }
    resolved.push_back(std::move(r));
  }

  int d = 1;
  Coord scalars = 0;
  for (const Resolved& r : resolved) {
    d = std::max(d, static_cast<int>(r.extents.size()));
    if (r.extents.empty()) ++scalars;
  }

  VertexNumbering vn;
  vn.dim = d;
  vn.params = params;
  vn.block.assign(d, 1);
  for (int j = 0; j < d; ++j) {
    Coord m = scalars;
    for (const Resolved& r : resolved)
      if (!r.extents.empty())
        m = std::max(m, j < static_cast<int>(r.extents.size()) ? r.extents[j]
                                                               : 1);
    vn.block[j] = pow10AtLeast(m);
  }

  int scalarOrd = 0, arrayOrd = 0;
  for (const Resolved& r : resolved) {
    ConnectorInfo c;
    c.name = r.name;
    c.scalar = r.extents.empty();
    if (c.scalar) {
      c.ordinal = ++scalarOrd;
      Point p(d, c.ordinal);
      c.extents.assign(d, 1);
      c.base.assign(d, c.ordinal - 1);
      c.set = IntervalSet(MDInterval::point(p));
    } else {
      c.ordinal = ++arrayOrd;
      c.extents = r.extents;
      c.extents.resize(d, 1);
      c.base.resize(d);
      std::vector<Coord> lo(d), st(d, 1), hi(d);
      for (int j = 0; j < d; ++j) {
        c.base[j] = checkedMul(c.ordinal, vn.block[j]);
        lo[j] = checkedAdd(c.base[j], 1);
        hi[j] = checkedAdd(c.base[j], c.extents[j]);
      }
      c.set = IntervalSet(*MDInterval::make(lo, st, hi));
    }
    vn.connectors.push_back(std::move(c));
  }
  return vn;
}

namespace {

/// Canonical text of a piece with its domain translated to start at 1,
/// used to spot duplicate connections written with shifted iterators.
std::string pieceKey(const MDInterval& dom, const AffineFn& f1,
                     const AffineFn& f2) {
  auto fnKey = [&](const AffineFn& f) {
    std::string s;
    for (int j = 0; j < f.dim(); ++j) {
      Rat off = f.offset[j] + f.gain[j] * Rat(dom.start()[j] - 1);
      s += ratStr(f.gain[j]) + "," + ratStr(off) + ";";
    }
    return s;
  };
  std::string domKey;
  for (int j = 0; j < dom.dim(); ++j)
    domKey += std::to_string(dom.end()[j] - dom.start()[j]) + ":" +
              std::to_string(dom.step()[j]) + ";";
  std::string a = fnKey(f1), b = fnKey(f2);
  return domKey + "|" + std::min(a + "|" + b, b + "|" + a);
}

} // namespace

BuildOutput buildGraph(const ConnectModel& model, const VertexNumbering& vn) {
  BuildOutput out;
  SBGraph& g = out.graph;
  const int d = vn.dim;
  g.dim = d;

  std::map<std::string, std::size_t> vidx;
  for (const ConnectorInfo& c : vn.connectors)
    vidx[c.name] = g.addVertex(c.name, c.set);

  std::vector<Instance> insts;
  std::vector<BoundIter> stack;
  collect(model.stmts, vn.params, stack, insts);

  struct RawPiece {
    MDInterval dom;
    AffineFn f1, f2;
  };
  struct Group {
    std::size_t v1, v2;
    std::vector<RawPiece> pieces;
    std::set<std::string> keys;
  };
  std::vector<Group> groups;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> groupAt;

  for (const Instance& inst : insts) {
    if (inst.empty) continue;
    const Connect& cn = *inst.conn;
    const ConnectorInfo* ca = vn.find(cn.a.connector());
    const ConnectorInfo* cb = vn.find(cn.b.connector());
    if (!ca || !cb)
      throw ModelError(loc(cn.line, cn.col) +
                       ": connector missing from the numbering");

    // Assign each iterator to the index position where it appears; the
    // position must agree across both references, and a position can
    // carry only one iterator (that slot becomes one domain dimension).
    std::vector<const BoundIter*> slotBound(d, nullptr);
    std::vector<std::string> slotName(d);
    std::map<std::string, int> iterSlot;
    auto assign = [&](const Ref& r) {
      for (int j = 0; j < static_cast<int>(r.indices.size()); ++j) {
        const IndexAffine& ix = r.indices[j];
        if (ix.var.empty()) continue;
        const BoundIter* bi = findIter(inst.iters, ix.var);
        if (!bi) continue; // parameter
        auto [it, fresh] = iterSlot.try_emplace(ix.var, j);
        if (!fresh && it->second != j)
          throw ModelError(loc(ix.line, ix.col) + ": iterator " + ix.var +
                           " is used at index positions " +
                           std::to_string(it->second + 1) + " and " +
                           std::to_string(j + 1) +
                           "; an iterator must stay in one position");
        if (!slotName[j].empty() && slotName[j] != ix.var)
          throw ModelError(loc(ix.line, ix.col) + ": iterators " +
                           slotName[j] + " and " + ix.var +
                           " are both used at index position " +
                           std::to_string(j + 1));
        slotName[j] = ix.var;
        slotBound[j] = bi;
      }
    };
    assign(cn.a);
    assign(cn.b);

    for (const BoundIter& it : inst.iters)
      if (!iterSlot.count(it.name))
        out.warnings.push_back(loc(cn.line, cn.col) + ": iterator " + it.name +
                               " is not used by this connect; the loop"
                               " dimension collapses");

    std::vector<Coord> lo(d, 1), st(d, 1), hi(d, 1);
    for (int j = 0; j < d; ++j)
      if (slotBound[j]) {
        lo[j] = slotBound[j]->lo;
        hi[j] = slotBound[j]->hi;
      }
    MDInterval dom = *MDInterval::make(lo, st, hi);

    auto makeFn = [&](const Ref& r, const ConnectorInfo& c) {
      AffineFn fn;
      fn.gain.assign(d, Rat(0));
      fn.offset.assign(d, Rat(0));
      if (c.scalar) {
        for (int j = 0; j < d; ++j) fn.offset[j] = Rat(c.ordinal);
        return fn;
      }
      for (int j = 0; j < d; ++j) {
        if (j >= static_cast<int>(r.indices.size())) {
          fn.offset[j] = Rat(c.base[j] + 1); // padded dimension
          continue;
        }
        const IndexAffine& ix = r.indices[j];
        IdxRange ir = resolveIndex(ix, inst, vn.params);
        if (ir.it) {
          if (ix.coef < Rat(0))
            throw ModelError(loc(ix.line, ix.col) + ": index expression " +
                             ix.str() + " decreases; gains must be"
                             " non-negative");
          if (ir.it->lo < ir.it->hi && !ratIsInt(ix.coef))
            throw ModelError(loc(ix.line, ix.col) + ": index expression " +
                             ix.str() + " needs an integer coefficient over"
                             " a multi-element range");
          if (!ratIsInt(ir.lo) || !ratIsInt(ir.hi))
            throw ModelError(loc(ix.line, ix.col) + ": index expression " +
                             ix.str() + " does not yield integers");
          fn.gain[j] = ix.coef;
          fn.offset[j] = Rat(c.base[j]) + Rat(ix.cst);
        } else {
          if (!ratIsInt(ir.lo))
            throw ModelError(loc(ix.line, ix.col) + ": index expression " +
                             ix.str() + " does not yield an integer");
          fn.gain[j] = Rat(0);
          fn.offset[j] = Rat(c.base[j] + ratFloor(ir.lo));
        }
        if (ratFloor(ir.lo) < 1 || ratFloor(ir.hi) > c.extents[j])
          throw ModelError(loc(ix.line, ix.col) + ": index range [" +
                           ratStr(ir.lo) + ":" + ratStr(ir.hi) + "] of " +
                           c.name + " is outside [1:" +
                           std::to_string(c.extents[j]) + "]");
      }
      return fn;
    };
    AffineFn f1 = makeFn(cn.a, *ca);
    AffineFn f2 = makeFn(cn.b, *cb);

    std::size_t va = vidx[ca->name], vb = vidx[cb->name];
    if (va == vb && f1 == f2)
      throw ModelError(loc(cn.line, cn.col) + ": connects " + ca->name +
                       " to itself");

    auto key = std::minmax(va, vb);
    auto [git, fresh] = groupAt.try_emplace(key, groups.size());
    if (fresh) groups.push_back(Group{va, vb, {}, {}});
    Group& grp = groups[git->second];
    if (va != grp.v1) std::swap(f1, f2);

    std::string ck = pieceKey(dom, f1, f2);
    if (!grp.keys.insert(ck).second) {
      out.warnings.push_back(loc(cn.line, cn.col) +
                             ": duplicate connection ignored");
      continue;
    }
    grp.pieces.push_back(RawPiece{dom, std::move(f1), std::move(f2)});
  }

  int edgeNo = 0;
  for (const Group& grp : groups) {
    std::vector<PWLMap::Piece> p1, p2;
    if (grp.pieces.size() == 1) {
      p1.push_back({IntervalSet(grp.pieces[0].dom), grp.pieces[0].f1});
      p2.push_back({IntervalSet(grp.pieces[0].dom), grp.pieces[0].f2});
    } else {
      // Translate piece k by k*P[j] to separate the local domains; P is
      // a power of ten above every piece end, so blocks never collide.
      std::vector<Coord> P(d, 1);
      for (int j = 0; j < d; ++j) {
        Coord m = 0;
        for (const RawPiece& rp : grp.pieces) m = std::max(m, rp.dom.end()[j]);
        P[j] = pow10Above(m);
      }
      for (std::size_t k = 0; k < grp.pieces.size(); ++k) {
        const RawPiece& rp = grp.pieces[k];
        std::vector<Coord> lo(d), st(d), hi(d);
        AffineFn g1 = rp.f1, g2 = rp.f2;
        for (int j = 0; j < d; ++j) {
          Coord shift = checkedMul(static_cast<Coord>(k), P[j]);
          lo[j] = checkedAdd(rp.dom.start()[j], shift);
          hi[j] = checkedAdd(rp.dom.end()[j], shift);
          st[j] = rp.dom.step()[j];
          g1.offset[j] -= g1.gain[j] * Rat(shift);
          g2.offset[j] -= g2.gain[j] * Rat(shift);
        }
        IntervalSet dset(*MDInterval::make(lo, st, hi));
        p1.push_back({dset, std::move(g1)});
        p2.push_back({dset, std::move(g2)});
      }
    }
    SetEdge e;
    e.name = "E" + std::to_string(++edgeNo);
    e.index1 = grp.v1;
    e.index2 = grp.v2;
    e.map1 = PWLMap::fromPieces(d, std::move(p1));
    e.map2 = PWLMap::fromPieces(d, std::move(p2));
    g.addEdge(std::move(e));
  }
  return out;
}

FlattenOutput flattenModel(const ConnectModel& model, const Params& params) {
  VertexNumbering vn = numberVertices(model, params);
  BuildOutput b = buildGraph(model, vn);
  ValidationReport rep = validate(b.graph);
  if (!rep.ok())
    throw ModelError("graph validation failed:\n" + rep.str());
  ConnectResult cr = connectComp(b.graph);
  EquationListing eq = generateEquations(cr.rmap);
  return FlattenOutput{std::move(vn), std::move(b.graph),
                       std::move(b.warnings), std::move(cr), std::move(eq)};
}

} // namespace sbg
