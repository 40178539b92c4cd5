#include "sbg/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace sbg {

namespace {

void enumerate(const IntervalSet& s, unsigned long long limit,
               unsigned long long& used, std::vector<Point>& out) {
  for (const MDInterval& box : s.pieces()) {
    unsigned long long card = box.cardinality();
    if (card > limit - used)
      throw PieceLimitError("expansion exceeds " + std::to_string(limit) +
                            " elements");
    used += card;
    Point p = box.start();
    while (true) {
      out.push_back(p);
      int j = box.dim() - 1;
      while (j >= 0) {
        p[j] += box.step()[j];
        if (p[j] <= box.end()[j]) break;
        p[j] = box.start()[j];
        --j;
      }
      if (j < 0) break;
    }
  }
}

std::size_t find(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

} // namespace

ExplicitGraph expand(const SBGraph& g, unsigned long long limit) {
  ExplicitGraph eg;
  unsigned long long used = 0;
  for (const SetVertex& v : g.vertices)
    enumerate(v.set, limit, used, eg.vertices);
  std::sort(eg.vertices.begin(), eg.vertices.end());

  std::map<Point, std::size_t> index;
  for (std::size_t i = 0; i < eg.vertices.size(); ++i)
    index.emplace(eg.vertices[i], i);

  EdgeMaps em = edgeMaps(g);
  std::vector<Point> dom;
  enumerate(em.emap1.wholeDomain(), limit, used, dom);
  for (const Point& x : dom) {
    Point a = em.emap1.apply(x);
    Point b = em.emap2.apply(x);
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      throw ModelError("edge element " + pointStr(x) + " has endpoint " +
                       pointStr(ia == index.end() ? a : b) +
                       " that is not a vertex element");
    eg.edges.emplace_back(ia->second, ib->second);
  }
  return eg;
}

std::vector<Point> ufComponents(const ExplicitGraph& eg) {
  std::size_t n = eg.vertices.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& [a, b] : eg.edges) {
    std::size_t ra = find(parent, a);
    std::size_t rb = find(parent, b);
    if (ra != rb) parent[ra] = rb;
  }

  // Vertices are sorted, so the first member seen per root is the
  // lexicographic minimum.
  std::vector<const Point*> best(n, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(parent, i);
    if (best[r] == nullptr) best[r] = &eg.vertices[i];
  }
  std::vector<Point> rep(n);
  for (std::size_t i = 0; i < n; ++i) rep[i] = *best[find(parent, i)];
  return rep;
}

std::string OracleCheck::str() const {
  std::ostringstream os;
  os << mismatchCount << " mismatches in " << checked << " vertices";
  for (const std::string& m : mismatches) os << "\n  " << m;
  return os.str();
}

OracleCheck checkAgainstOracle(const SBGraph& g, const PWLMap& rmap,
                               unsigned long long limit) {
  OracleCheck res;
  ExplicitGraph eg = expand(g, limit);
  std::vector<Point> rep = ufComponents(eg);
  for (std::size_t i = 0; i < eg.vertices.size(); ++i) {
    ++res.checked;
    std::string bad;
    try {
      Point got = rmap.apply(eg.vertices[i]);
      if (got != rep[i])
        bad = "vertex " + pointStr(eg.vertices[i]) + ": map gives " +
              pointStr(got) + ", enumeration gives " + pointStr(rep[i]);
    } catch (const DomainError&) {
      bad = "vertex " + pointStr(eg.vertices[i]) + " is outside the map domain";
    }
    if (!bad.empty()) {
      ++res.mismatchCount;
      if (res.mismatches.size() < 10) res.mismatches.push_back(std::move(bad));
    }
  }
  return res;
}

} // namespace sbg
