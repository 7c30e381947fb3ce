#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "neretin/chain_complex.hpp"
#include "neretin/group_json.hpp"

namespace neretin {

/// A small category with at most one arrow per ordered pair of objects,
/// stored as a relation on object indices. Identities are implicit.
class GenPoset {
public:
  using Arrow = std::pair<std::size_t, std::size_t>;

  GenPoset() = default;

  GenPoset(const std::vector<std::string>& objects, const std::vector<std::pair<std::string, std::string>>& arrows) {
    for (const auto& o : objects) add_object(o);
    for (const auto& [a, b] : arrows) add_arrow(index(a), index(b));
  }

  std::size_t add_object(const std::string& id) {
    if (index_.count(id)) throw InvalidArgument("duplicate object id '" + id + "'");
    index_.emplace(id, objects_.size());
    objects_.push_back(id);
    return objects_.size() - 1;
  }

  /// Stores a -> b; identities are accepted here so validate() can report them.
  void add_arrow(std::size_t a, std::size_t b) {
    if (a >= size() || b >= size()) throw InvalidArgument("arrow endpoint out of range");
    arrows_.emplace(a, b);
  }

  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::string& id(std::size_t i) const { return objects_.at(i); }
  const std::set<Arrow>& arrows() const { return arrows_; }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index(const std::string& id) const {
    auto i = find(id);
    if (!i) throw InvalidArgument("unknown object '" + id + "'");
    return *i;
  }

  bool has_arrow(std::size_t a, std::size_t b) const { return a == b || arrows_.count({a, b}) > 0; }
  bool isomorphic(std::size_t a, std::size_t b) const { return has_arrow(a, b) && has_arrow(b, a); }

  bool has_isomorphisms() const {
    for (const auto& [a, b] : arrows_)
      if (a != b && arrows_.count({b, a})) return true;
    return false;
  }

  /// Adds all composites.
  void close() {
    const std::size_t n = size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : arrows_) r[a][b] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (r[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (r[k][j]) r[i][j] = true;
    arrows_.clear();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && r[i][j]) arrows_.emplace(i, j);
  }

  /// Full subcategory on `keep` (in the given order).
  GenPoset full_subcategory(const std::vector<std::size_t>& keep) const {
    GenPoset out;
    std::vector<std::size_t> pos(size(), SIZE_MAX);
    for (auto i : keep) pos[i] = out.add_object(objects_[i]);
    for (const auto& [a, b] : arrows_)
      if (pos[a] != SIZE_MAX && pos[b] != SIZE_MAX) out.arrows_.emplace(pos[a], pos[b]);
    return out;
  }

  std::vector<std::size_t> successors(std::size_t a) const {
    std::vector<std::size_t> out;
    for (auto it = arrows_.lower_bound({a, 0}); it != arrows_.end() && it->first == a; ++it) out.push_back(it->second);
    return out;
  }

  friend bool operator==(const GenPoset& a, const GenPoset& b) {
    return a.objects_ == b.objects_ && a.arrows_ == b.arrows_;
  }

private:
  std::vector<std::string> objects_;
  std::unordered_map<std::string, std::size_t> index_;
  std::set<Arrow> arrows_;
};

struct Violation {
  enum class Kind { MissingComposite, StoredIdentity } kind;
  std::size_t a = 0, b = 0, c = 0;  // a -> b -> c with a -> c missing

  std::string describe(const GenPoset& p) const {
    if (kind == Kind::StoredIdentity) return "identity arrow stored at " + p.id(a);
    return "missing composite " + p.id(a) + " -> " + p.id(c) + " of " + p.id(a) + " -> " + p.id(b) + " -> " + p.id(c);
  }
};

/// First violation of composition closure or identity-free storage.
inline std::optional<Violation> validate(const GenPoset& p) {
  for (const auto& [a, b] : p.arrows())
    if (a == b) return Violation{Violation::Kind::StoredIdentity, a, a, a};
  for (const auto& [a, b] : p.arrows())
    for (auto c : p.successors(b))
      if (c != a && !p.has_arrow(a, c)) return Violation{Violation::Kind::MissingComposite, a, b, c};
  return std::nullopt;
}

inline void require_valid(const GenPoset& p, const std::string& where) {
  if (auto v = validate(p)) throw InvalidArgument(where + ": " + v->describe(p));
}

struct Quotient {
  GenPoset poset;
  std::vector<std::size_t> projection;  // object -> class
};

/// C/G: objects are the classes of the groupoid G (given by arrow pairs),
/// [x] -> [y] when some representatives are joined. Each class is named by
/// its first member.
inline Quotient quotient_by_subgroupoid(const GenPoset& c, const std::vector<GenPoset::Arrow>& g) {
  std::set<GenPoset::Arrow> rel(g.begin(), g.end());
  for (const auto& [a, b] : rel) {
    if (a == b) continue;
    if (!c.isomorphic(a, b)) throw InvalidArgument("subgroupoid contains a non-invertible arrow " + c.id(a) + " -> " + c.id(b));
    if (!rel.count({b, a})) throw InvalidArgument("subgroupoid is not closed under inverses at " + c.id(a));
  }
  std::vector<std::size_t> parent(c.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : rel) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  // a groupoid is closed under composition: every pair in a class must be related
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = a + 1; b < c.size(); ++b)
      if (find(a) == find(b) && !rel.count({a, b}))
        throw InvalidArgument("subgroupoid is not closed under composition at " + c.id(a) + ", " + c.id(b));
  Quotient q;
  std::map<std::size_t, std::size_t> cls;
  q.projection.resize(c.size());
  for (std::size_t x = 0; x < c.size(); ++x) {
    auto r = find(x);
    auto it = cls.find(r);
    if (it == cls.end()) it = cls.emplace(r, q.poset.add_object(c.id(r))).first;
    q.projection[x] = it->second;
  }
  for (const auto& [a, b] : c.arrows())
    if (q.projection[a] != q.projection[b]) q.poset.add_arrow(q.projection[a], q.projection[b]);
  q.poset.close();
  return q;
}

/// All isomorphisms of c, as a subgroupoid.
inline std::vector<GenPoset::Arrow> isomorphism_groupoid(const GenPoset& c) {
  std::vector<GenPoset::Arrow> out;
  for (const auto& [a, b] : c.arrows())
    if (a != b && c.has_arrow(b, a)) out.emplace_back(a, b);
  return out;
}

inline Quotient underlying_poset(const GenPoset& c) { return quotient_by_subgroupoid(c, isomorphism_groupoid(c)); }

/// Disjoint union plus an arrow from every object of c to every object of d.
inline GenPoset join(const GenPoset& c, const GenPoset& d) {
  GenPoset out;
  for (const auto& o : c.objects()) out.add_object(o);
  for (const auto& o : d.objects()) {
    if (c.find(o)) throw InvalidArgument("join: object id '" + o + "' occurs in both factors");
    out.add_object(o);
  }
  const std::size_t off = c.size();
  for (const auto& [a, b] : c.arrows()) out.add_arrow(a, b);
  for (const auto& [a, b] : d.arrows()) out.add_arrow(off + a, off + b);
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b) out.add_arrow(a, off + b);
  return out;
}

/// join(c, d) with an extra object "tip" receiving arrows from c and
/// sending arrows to d.
inline GenPoset coone(const GenPoset& c, const GenPoset& d, const std::string& tip = "tip") {
  GenPoset out = join(c, d);
  if (out.find(tip)) throw InvalidArgument("coone: object id '" + tip + "' is already used");
  auto t = out.add_object(tip);
  for (std::size_t a = 0; a < c.size(); ++a) out.add_arrow(a, t);
  for (std::size_t b = 0; b < d.size(); ++b) out.add_arrow(t, c.size() + b);
  out.close();
  return out;
}

/// Chains of an honest poset as a simplicial chain complex (vertex i is object i).
namespace detail {
inline void require_honest(const GenPoset& p) {
  if (p.has_isomorphisms()) throw InvalidArgument("order_complex: input has isomorphisms; pass it through underlying_poset first");
  require_valid(p, "order_complex");
}
}  // namespace detail

inline ChainComplex order_complex(const GenPoset& p, int max_dim) {
  detail::require_honest(p);
  Graph g{p.size(), {}};
  for (const auto& [a, b] : p.arrows())
    g.edges.emplace_back(static_cast<std::uint32_t>(std::min(a, b)), static_cast<std::uint32_t>(std::max(a, b)));
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return flag_complex(g, max_dim);
}

/// Longest chain length, a safe max_dim for order_complex. Needs an honest poset.
inline int height(const GenPoset& p) {
  // longest path in the DAG of arrows
  std::vector<int> memo(p.size(), -1);
  auto rec = [&](auto&& self, std::size_t a) -> int {
    if (memo[a] >= 0) return memo[a];
    int best = 0;
    for (auto b : p.successors(a)) best = std::max(best, 1 + self(self, b));
    return memo[a] = best;
  };
  int h = 0;
  for (std::size_t a = 0; a < p.size(); ++a) h = std::max(h, rec(rec, a));
  return h;
}

/// Object sets of the connected components, each sorted, in order of least member.
inline std::vector<std::vector<std::size_t>> connected_components(const GenPoset& p) {
  std::vector<std::size_t> parent(p.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : p.arrows()) parent[find(a)] = find(b);
  std::map<std::size_t, std::size_t> slot;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t x = 0; x < p.size(); ++x) {
    auto [it, fresh] = slot.emplace(find(x), out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(x);
  }
  return out;
}

inline ChainComplex order_complex(const GenPoset& p) {
  detail::require_honest(p);
  return order_complex(p, height(p));
}

struct DescendingLink {
  GenPoset over;   // lower objects with an arrow to x
  GenPoset under;  // lower objects receiving an arrow from x
  GenPoset link() const { return join(over, under); }
};

inline DescendingLink descending_link(const GenPoset& c, std::size_t x, const std::vector<bool>& lower) {
  if (lower.size() != c.size()) throw InvalidArgument("descending_link: predicate has wrong length");
  if (lower[x]) throw InvalidArgument("descending_link: object already lies in the lower part");
  std::vector<std::size_t> over, under;
  for (std::size_t y = 0; y < c.size(); ++y) {
    if (!lower[y]) continue;
    if (c.isomorphic(x, y))
      throw InvalidArgument("descending_link: " + c.id(x) + " is isomorphic to " + c.id(y) +
                            " in the lower part; adding it is a homotopy equivalence");
    if (c.has_arrow(y, x)) over.push_back(y);
    if (c.has_arrow(x, y)) under.push_back(y);
  }
  return {c.full_subcategory(over), c.full_subcategory(under)};
}

using ObjectPermutation = std::vector<std::size_t>;

/// Full subcategory on the objects fixed by every given automorphism.
inline GenPoset fixed_subcategory(const GenPoset& c, const std::vector<ObjectPermutation>& action) {
  for (const auto& g : action) {
    if (g.size() != c.size()) throw InvalidArgument("fixed_subcategory: permutation has wrong length");
    std::vector<bool> hit(c.size(), false);
    for (auto x : g) {
      if (x >= c.size() || hit[x]) throw InvalidArgument("fixed_subcategory: not a permutation");
      hit[x] = true;
    }
    for (const auto& [a, b] : c.arrows())
      if (!c.has_arrow(g[a], g[b]))
        throw InvalidArgument("fixed_subcategory: action does not preserve the arrow " + c.id(a) + " -> " + c.id(b));
  }
  std::vector<std::size_t> keep;
  for (std::size_t x = 0; x < c.size(); ++x)
    if (std::all_of(action.begin(), action.end(), [&](const ObjectPermutation& g) { return g[x] == x; }))
      keep.push_back(x);
  return c.full_subcategory(keep);
}

/// Partial Morse function: nullopt marks the base subcategory.
using MorseFn = std::vector<std::optional<long>>;

struct MorseCheck {
  bool generalized = true;    // no non-invertible arrow inside a level
  bool well_behaved = true;   // no isomorphism across levels
  std::optional<GenPoset::Arrow> witness;
};

inline MorseCheck check_morse(const GenPoset& c, const MorseFn& f) {
  if (f.size() != c.size()) throw InvalidArgument("check_morse: function has wrong length");
  MorseCheck r;
  for (const auto& [a, b] : c.arrows()) {
    if (!f[a] || !f[b]) continue;
    bool iso = c.isomorphic(a, b);
    if (*f[a] == *f[b] && !iso && r.generalized) {
      r.generalized = false;
      r.witness = GenPoset::Arrow{a, b};
    }
    if (*f[a] != *f[b] && iso) {
      r.well_behaved = false;
      if (!r.witness) r.witness = GenPoset::Arrow{a, b};
    }
  }
  return r;
}

/// Structural isomorphism test: color refinement on in/out neighborhoods,
/// then backtracking along a connected order (small inputs only).
inline std::optional<std::vector<std::size_t>> find_isomorphism(const GenPoset& a, const GenPoset& b) {
  const std::size_t n = a.size();
  if (n != b.size() || a.arrows().size() != b.arrows().size()) return std::nullopt;
  if (n == 0) return std::vector<std::size_t>{};
  // joint refinement so colors are comparable across a and b
  auto neighbors = [](const GenPoset& p) {
    std::vector<std::vector<std::size_t>> in(p.size()), out(p.size());
    for (const auto& [s, t] : p.arrows()) {
      out[s].push_back(t);
      in[t].push_back(s);
    }
    return std::make_pair(in, out);
  };
  auto [ain, aout] = neighbors(a);
  auto [bin, bout] = neighbors(b);
  std::vector<std::size_t> ca(n, 0), cb(n, 0);
  for (std::size_t round = 0; round <= n; ++round) {
    using Sig = std::tuple<std::size_t, std::vector<std::size_t>, std::vector<std::size_t>>;
    auto sig = [](std::size_t x, const std::vector<std::size_t>& col, const std::vector<std::vector<std::size_t>>& in,
                  const std::vector<std::vector<std::size_t>>& out) {
      std::vector<std::size_t> i, o;
      for (auto y : in[x]) i.push_back(col[y]);
      for (auto y : out[x]) o.push_back(col[y]);
      std::sort(i.begin(), i.end());
      std::sort(o.begin(), o.end());
      return Sig{col[x], i, o};
    };
    std::map<Sig, std::size_t> ids;
    std::vector<Sig> sa, sb;
    for (std::size_t x = 0; x < n; ++x) {
      sa.push_back(sig(x, ca, ain, aout));
      sb.push_back(sig(x, cb, bin, bout));
      ids.emplace(sa.back(), 0);
      ids.emplace(sb.back(), 0);
    }
    std::size_t next = 0;
    for (auto& [k, v] : ids) v = next++;
    std::vector<std::size_t> na(n), nb(n);
    for (std::size_t x = 0; x < n; ++x) {
      na[x] = ids[sa[x]];
      nb[x] = ids[sb[x]];
    }
    const bool stable = std::set<std::size_t>(na.begin(), na.end()).size() == std::set<std::size_t>(ca.begin(), ca.end()).size();
    ca = std::move(na);
    cb = std::move(nb);
    if (stable) break;
  }
  {
    auto x = ca, y = cb;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x != y) return std::nullopt;
  }
  // order a's objects so each one after the first in its component touches an earlier one
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (placed[s]) continue;
    placed[s] = true;
    std::size_t i = order.size();
    order.push_back(s);
    for (; i < order.size(); ++i) {
      const auto x = order[i];
      for (const auto* adj : {&ain[x], &aout[x]})
        for (auto y : *adj)
          if (!placed[y]) {
            placed[y] = true;
            order.push_back(y);
          }
    }
  }
  std::vector<std::size_t> map(n, SIZE_MAX);
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (i == n) return true;
    const std::size_t x = order[i];
    for (std::size_t y = 0; y < n; ++y) {
      if (used[y] || ca[x] != cb[y]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        auto z = order[j];
        ok = a.has_arrow(x, z) == b.has_arrow(y, map[z]) && a.has_arrow(z, x) == b.has_arrow(map[z], y);
      }
      if (!ok) continue;
      map[x] = y;
      used[y] = true;
      if (self(self, i + 1)) return true;
      used[y] = false;
    }
    map[x] = SIZE_MAX;
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  return map;
}

inline Json to_json(const GenPoset& p) {
  std::vector<std::string> objs = p.objects();
  std::sort(objs.begin(), objs.end());
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const auto& [a, b] : p.arrows()) arrows.emplace_back(p.id(a), p.id(b));
  std::sort(arrows.begin(), arrows.end());
  Json j;
  j["objects"] = objs;
  Json as = Json::array();
  for (const auto& [a, b] : arrows) as.push_back({a, b});
  j["arrows"] = as;
  return j;
}

inline GenPoset genposet_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("objects") || !j.contains("arrows"))
    throw InvalidArgument("poset JSON needs 'objects' and 'arrows'");
  try {
    std::vector<std::pair<std::string, std::string>> arrows;
    for (const auto& a : j["arrows"]) {
      if (!a.is_array() || a.size() != 2) throw InvalidArgument("arrow must be a [src, dst] pair");
      arrows.emplace_back(a[0].get<std::string>(), a[1].get<std::string>());
    }
    return GenPoset(j["objects"].get<std::vector<std::string>>(), arrows);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("poset JSON: ") + e.what());
  }
}

}  // namespace neretin
