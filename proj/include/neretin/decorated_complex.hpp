#pragma once

#include <algorithm>
#include <vector>

#include "neretin/chain_complex.hpp"
#include "neretin/group_json.hpp"
#include "neretin/perm.hpp"

namespace neretin {

/// A q-subset of {1..n} with a coset of D in Sym(q), stored as its minimal
/// representative.
struct DecoratedVertex {
  std::vector<int> support;  // sorted, 1-based
  Perm decoration;

  friend auto operator<=>(const DecoratedVertex&, const DecoratedVertex&) = default;
  friend bool operator==(const DecoratedVertex&, const DecoratedVertex&) = default;
};

inline bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return true;
}

/// The flag complex C_n: vertices are decorated q-subsets, edges join
/// vertices with disjoint supports.
struct DecoratedComplex {
  int n = 0;
  Config config;
  std::vector<DecoratedVertex> vertices;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  Graph graph() const { return Graph{vertices.size(), edges}; }
  ChainComplex flag(int max_dim) const { return flag_complex(graph(), max_dim); }

  friend bool operator==(const DecoratedComplex& a, const DecoratedComplex& b) {
    return a.n == b.n && a.config == b.config && a.vertices == b.vertices && a.edges == b.edges;
  }
};

namespace detail {

inline void subsets(int n, int q, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == q) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i <= n; ++i) {
    cur.push_back(i);
    subsets(n, q, i + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> disjointness_edges(const std::vector<DecoratedVertex>& vs) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < vs.size(); ++i)
    for (std::uint32_t j = i + 1; j < vs.size(); ++j)
      if (disjoint(vs[i].support, vs[j].support)) edges.emplace_back(i, j);
  return edges;
}

}  // namespace detail

inline DecoratedComplex build_Cn(const Config& config, int n) {
  if (n < 1) throw InvalidArgument("build_Cn: n must be >= 1");
  DecoratedComplex c;
  c.n = n;
  c.config = config;
  std::vector<std::vector<int>> supports;
  std::vector<int> cur;
  detail::subsets(n, config.q, 1, cur, supports);
  auto reps = config.D.left_coset_reps();
  for (const auto& s : supports)
    for (const auto& r : reps) c.vertices.push_back({s, r});
  c.edges = detail::disjointness_edges(c.vertices);
  return c;
}

/// floor((n-q)/(2q-1)) - 1
inline int nu_bound(const Config& config, int n) {
  if (n < 1) throw InvalidArgument("nu_bound: n must be >= 1");
  const int num = n - config.q, den = 2 * config.q - 1;
  int fl = num / den;
  if (num % den != 0 && num < 0) --fl;
  return fl - 1;
}

/// Binary number with digit i (most significant first) set iff i lies in
/// the support, for i in the base vertex {1..q}.
inline int morse_f(const DecoratedVertex& a, int q) {
  int value = 0;
  bool meets = false;
  for (int i = 1; i <= q; ++i) {
    bool in = std::binary_search(a.support.begin(), a.support.end(), i);
    meets = meets || in;
    value = value * 2 + (in ? 1 : 0);
  }
  if (!meets) throw InvalidArgument("morse_f: vertex is disjoint from the base vertex");
  return value;
}

struct DescendingLinkCn {
  DecoratedComplex complex;             // relabeled onto {1..k}
  std::vector<int> ground;              // ground[i-1] = original element with new label i
  std::vector<std::uint32_t> vertices;  // original index of each vertex
};

/// Full subcomplex on the vertices disjoint from a with larger minimum,
/// relabeled order-preservingly; checked equal to C_k.
inline DescendingLinkCn desc_link_Cn(const DecoratedComplex& c, const DecoratedVertex& a) {
  const int q = c.config.q;
  if (a.support.empty() || a.support.front() > q)
    throw InvalidArgument("desc_link_Cn: vertex does not meet the base vertex");
  DescendingLinkCn out;
  const int min_a = a.support.front();
  for (int i = min_a + 1; i <= c.n; ++i)
    if (!std::binary_search(a.support.begin(), a.support.end(), i)) out.ground.push_back(i);
  const int k = static_cast<int>(out.ground.size());
  if (k != c.n - q - (min_a - 1)) throw CheckFailed("desc_link_Cn: ground set has unexpected size");
  std::vector<int> relabel(static_cast<std::size_t>(c.n) + 1, 0);
  for (int i = 0; i < k; ++i) relabel[static_cast<std::size_t>(out.ground[static_cast<std::size_t>(i)])] = i + 1;

  out.complex.n = k;
  out.complex.config = c.config;
  for (std::uint32_t v = 0; v < c.vertices.size(); ++v) {
    const auto& x = c.vertices[v];
    if (x.support.front() <= min_a || !disjoint(x.support, a.support)) continue;
    DecoratedVertex y{{}, x.decoration};
    for (int e : x.support) y.support.push_back(relabel[static_cast<std::size_t>(e)]);
    out.complex.vertices.push_back(std::move(y));
    out.vertices.push_back(v);
  }
  // vertex order is preserved by an order-preserving relabeling
  out.complex.edges = detail::disjointness_edges(out.complex.vertices);
  if (k >= 1 && !(out.complex == build_Cn(c.config, k)))
    throw CheckFailed("desc_link_Cn: descending link is not isomorphic to C_k");
  return out;
}

inline Json to_json(const DecoratedComplex& c) {
  Json j;
  j["n"] = c.n;
  j["q"] = c.config.q;
  j["D"] = group_to_json(c.config.D);
  Json vs = Json::array();
  for (const auto& v : c.vertices) {
    Json o;
    o["support"] = v.support;
    o["decoration"] = v.decoration.str();
    vs.push_back(o);
  }
  j["vertices"] = vs;
  Json es = Json::array();
  for (auto [a, b] : c.edges) es.push_back({a, b});
  j["edges"] = es;
  return j;
}

}  // namespace neretin
