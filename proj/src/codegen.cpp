#include "sbg/codegen.hpp"

#include <algorithm>
#include <sstream>

namespace sbg {

std::string loopVar(int j) {
  static const char* names[] = {"i", "j", "k", "l", "m", "n"};
  if (j >= 0 && j < 6) return names[j];
  return "x" + std::to_string(j + 1);
}

std::string TermDim::str(const std::string& var) const {
  switch (kind) {
    case Kind::Value:
      return std::to_string(value);
    case Kind::Fresh:
      return var + "1";
    case Kind::Affine:
      break;
  }
  std::string out = coef == Rat(1) ? var : ratStr(coef) + "*" + var;
  if (shift != Rat(0))
    out += shift > Rat(0) ? "+" + ratStr(shift) : ratStr(shift);
  return out;
}

bool Term::hasFresh() const {
  for (const TermDim& d : dims)
    if (d.kind == TermDim::Kind::Fresh) return true;
  return false;
}

namespace {

std::string argList(const Term& t) {
  std::string s;
  for (std::size_t j = 0; j < t.dims.size(); ++j) {
    if (j) s += ",";
    s += t.dims[j].str(loopVar(static_cast<int>(j)));
  }
  return s;
}

std::string progStr(Coord a, Coord s, Coord b) {
  return "[" + std::to_string(a) + ":" + std::to_string(s) + ":" +
         std::to_string(b) + "]";
}

std::string flowTerm(const Term& t) {
  std::string call = "flow(" + argList(t) + ")";
  if (!t.hasFresh()) return call;
  std::string out = "sum(" + call;
  for (std::size_t j = 0; j < t.dims.size(); ++j) {
    const TermDim& d = t.dims[j];
    if (d.kind == TermDim::Kind::Fresh)
      out += ", for " + loopVar(static_cast<int>(j)) + "1 in " +
             progStr(d.a, d.s, d.b);
  }
  return out + ")";
}

std::string varList(int dim) {
  std::string s;
  for (int j = 0; j < dim; ++j) {
    if (j) s += ",";
    s += loopVar(j);
  }
  return s;
}

} // namespace

std::string Equation::str() const {
  int d = loop.dim();
  std::ostringstream os;
  os << "for " << varList(d) << " in {" << loop.str() << "}\n";
  if (isFlow) {
    os << "  flow(" << varList(d) << ")";
    for (const Term& t : sums) os << " + " << flowTerm(t);
    os << " = 0\n";
  } else {
    os << "  effort(" << varList(d) << ") = effort(" << argList(rhs) << ")\n";
  }
  os << "end";
  return os.str();
}

std::string EquationListing::str() const {
  std::string out;
  for (const Equation& e : equations) {
    out += e.str();
    out += "\n";
  }
  return out;
}

EquationListing generateEquations(const PWLMap& rmap) {
  EquationListing out;
  out.dim = rmap.dim();
  if (rmap.empty()) return out;

  if (!compose(rmap, rmap).semanticallyEqual(rmap))
    throw PreconditionError(
        "equation generation needs an idempotent representative map");

  const int d = rmap.dim();

  // One (box, fn) subpiece per domain box, plus its image box.
  struct Sub {
    MDInterval dom;
    AffineFn fn;
  };
  std::vector<Sub> subs;
  std::vector<MDInterval> images;
  for (const PWLMap::Piece& piece : rmap.pieces())
    for (const MDInterval& box : piece.dom.pieces()) {
      subs.push_back({box, piece.fn});
      PWLMap one = PWLMap::fromPieces(d, {{IntervalSet(box), piece.fn}});
      IntervalSet img = one.image();
      for (const MDInterval& ib : img.pieces()) images.push_back(ib);
    }

  // Refine the image boxes into atoms: pairwise-disjoint boxes such that
  // every image box is a union of atoms.
  std::vector<MDInterval> atoms;
  for (const MDInterval& b : images) {
    IntervalSet rem(b);
    std::vector<MDInterval> next;
    for (const MDInterval& a : atoms) {
      if (rem.empty()) {
        next.push_back(a);
        continue;
      }
      IntervalSet aset(a);
      IntervalSet inter = setIntersection(aset, rem);
      if (inter.empty()) {
        next.push_back(a);
        continue;
      }
      for (const MDInterval& p : inter.pieces()) next.push_back(p);
      IntervalSet diff = setMinus(aset, rem);
      for (const MDInterval& p : diff.pieces()) next.push_back(p);
      rem = setMinus(rem, aset);
    }
    for (const MDInterval& p : rem.pieces()) next.push_back(p);
    atoms = std::move(next);
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const MDInterval& x, const MDInterval& y) {
              return x.start() < y.start();
            });

  for (const MDInterval& at : atoms) {
    IntervalSet atSet(at);

    struct Entry {
      MDInterval pre;
      const AffineFn* fn;
    };
    std::vector<Entry> entries;
    for (const Sub& sub : subs) {
      PWLMap one = PWLMap::fromPieces(d, {{IntervalSet(sub.dom), sub.fn}});
      IntervalSet pre = one.preImageOf(atSet);
      for (const MDInterval& pbox : pre.pieces()) {
        bool ident = true;
        for (int j = 0; j < d && ident; ++j) {
          if (sub.fn.gain[j] == Rat(1) && sub.fn.offset[j] == Rat(0)) continue;
          if (pbox.start()[j] == pbox.end()[j]) {
            auto v = ratApply(sub.fn.gain[j], sub.fn.offset[j], pbox.start()[j]);
            if (v && *v == pbox.start()[j]) continue;
          }
          ident = false;
        }
        if (!ident) entries.push_back({pbox, &sub.fn});
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& x, const Entry& y) {
                return x.pre.start() < y.pre.start();
              });

    std::vector<Term> sums;
    for (const Entry& e : entries) {
      Term rhs;
      Term ft;
      rhs.dims.resize(d);
      ft.dims.resize(d);
      for (int j = 0; j < d; ++j) {
        const Rat& g = e.fn->gain[j];
        const Rat& o = e.fn->offset[j];
        const bool single = e.pre.start()[j] == e.pre.end()[j];

        TermDim& r = rhs.dims[j];
        if (g == Rat(0)) {
          r.kind = TermDim::Kind::Value;
          r.value = ratFloor(o);
        } else if (single) {
          r.kind = TermDim::Kind::Value;
          r.value = *ratApply(g, o, e.pre.start()[j]);
        } else {
          r.kind = TermDim::Kind::Affine;
          r.coef = g;
          r.shift = o;
        }

        TermDim& f = ft.dims[j];
        if (g != Rat(0)) {
          f.kind = TermDim::Kind::Affine;
          f.coef = Rat(1) / g;
          f.shift = -o / g;
        } else if (single) {
          f.kind = TermDim::Kind::Affine;
          f.coef = Rat(1);
          f.shift = Rat(e.pre.start()[j] - at.start()[j]);
        } else {
          f.kind = TermDim::Kind::Fresh;
          f.a = e.pre.start()[j];
          f.s = e.pre.step()[j];
          f.b = e.pre.end()[j];
        }
      }
      out.equations.push_back(Equation{false, e.pre, std::move(rhs), {}});
      sums.push_back(std::move(ft));
    }
    out.equations.push_back(Equation{true, at, Term{}, std::move(sums)});
  }
  return out;
}

} // namespace sbg
