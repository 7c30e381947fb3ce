#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "neretin/decorated_complex.hpp"
#include "neretin/genposet.hpp"

namespace neretin {

/// A complete q-ary tree whose leaves carry distinct labels. A leaf has no
/// children; an internal node has exactly q.
struct LabeledTree {
  int label = 0;
  std::vector<LabeledTree> children;

  bool is_leaf() const { return children.empty(); }

  std::size_t leaves() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& c : children) n += c.leaves();
    return n;
  }
  int depth() const {
    int d = 0;
    for (const auto& c : children) d = std::max(d, 1 + c.depth());
    return d;
  }

  std::string str() const {
    if (is_leaf()) return std::to_string(label);
    std::string s = "[";
    for (std::size_t i = 0; i < children.size(); ++i) s += (i ? "," : "") + children[i].str();
    return s + "]";
  }

  friend std::strong_ordering operator<=>(const LabeledTree& a, const LabeledTree& b) {
    if (a.is_leaf() != b.is_leaf()) return a.is_leaf() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_leaf()) return a.label <=> b.label;
    for (std::size_t i = 0; i < a.children.size() && i < b.children.size(); ++i)
      if (auto c = a.children[i] <=> b.children[i]; c != 0) return c;
    return a.children.size() <=> b.children.size();
  }
  friend bool operator==(const LabeledTree& a, const LabeledTree& b) { return (a <=> b) == 0; }
};

/// Orbit representative under D acting on the children of every internal node.
inline LabeledTree canonical_tree(LabeledTree t, const PermGroup& D) {
  if (t.is_leaf()) return t;
  for (auto& c : t.children) c = canonical_tree(std::move(c), D);
  std::vector<LabeledTree> best;
  for (const auto& s : D.elements()) {
    std::vector<LabeledTree> cand(t.children.size());
    for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = t.children[static_cast<std::size_t>(s(static_cast<int>(i)))];
    if (best.empty() || cand < best) best = std::move(cand);
  }
  t.children = std::move(best);
  return t;
}

/// A split map kB -> nB modulo transformations of the domain: one canonical
/// labeled tree per domain summand, blocks sorted.
struct SplitRecord {
  std::vector<LabeledTree> blocks;

  std::size_t k() const { return blocks.size(); }
  std::size_t n() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += b.leaves();
    return s;
  }
  bool very_elementary(int q) const {
    return std::all_of(blocks.begin(), blocks.end(), [&](const LabeledTree& b) {
      auto l = b.leaves();
      return l == 1 || l == static_cast<std::size_t>(q);
    });
  }
  std::string id() const {
    std::string s;
    for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? "|" : "") + blocks[i].str();
    return s;
  }

  friend auto operator<=>(const SplitRecord&, const SplitRecord&) = default;
  friend bool operator==(const SplitRecord&, const SplitRecord&) = default;
};

inline SplitRecord make_record(std::vector<LabeledTree> blocks, const PermGroup& D) {
  for (auto& b : blocks) b = canonical_tree(std::move(b), D);
  std::sort(blocks.begin(), blocks.end());
  return {std::move(blocks)};
}

namespace detail {

// all canonical labeled trees on the labels in `mask` (bit i = label i+1)
class TreeTable {
public:
  TreeTable(const Config& c) : config_(c) {}

  const std::vector<LabeledTree>& trees(std::uint32_t mask) {
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    std::set<LabeledTree> out;
    std::vector<int> labels;
    for (int i = 0; i < 32; ++i)
      if (mask >> i & 1u) labels.push_back(i + 1);
    const int q = config_.q;
    if (labels.size() == 1) {
      out.insert(LabeledTree{labels[0], {}});
    } else if ((labels.size() - 1) % static_cast<std::size_t>(q - 1) == 0) {
      // ordered splits into q nonempty parts of admissible size
      std::vector<int> part(labels.size(), 0);
      for (;;) {
        std::vector<std::uint32_t> parts(static_cast<std::size_t>(q), 0);
        for (std::size_t i = 0; i < labels.size(); ++i)
          parts[static_cast<std::size_t>(part[i])] |= 1u << (labels[i] - 1);
        bool ok = true;
        for (auto p : parts) {
          int sz = __builtin_popcount(p);
          ok = ok && sz > 0 && (sz - 1) % (q - 1) == 0;
        }
        if (ok) product(parts, 0, {}, out);
        std::size_t i = 0;
        while (i < part.size() && ++part[i] == q) part[i++] = 0;
        if (i == part.size()) break;
      }
    }
    return memo_.emplace(mask, std::vector<LabeledTree>(out.begin(), out.end())).first->second;
  }

private:
  void product(const std::vector<std::uint32_t>& parts, std::size_t i, std::vector<LabeledTree> cur,
               std::set<LabeledTree>& out) {
    if (i == parts.size()) {
      out.insert(canonical_tree(LabeledTree{0, std::move(cur)}, config_.D));
      return;
    }
    const auto options = trees(parts[i]);  // copy: the memo may rehash
    for (const auto& t : options) {
      auto next = cur;
      next.push_back(t);
      product(parts, i + 1, std::move(next), out);
    }
  }

  Config config_;
  std::map<std::uint32_t, std::vector<LabeledTree>> memo_;
};

inline void set_partitions(int n, int q, int next, std::vector<std::uint32_t>& blocks,
                           std::vector<std::vector<std::uint32_t>>& out) {
  if (next > n) {
    for (auto b : blocks)
      if ((__builtin_popcount(b) - 1) % (q - 1) != 0) return;
    out.push_back(blocks);
    return;
  }
  const std::uint32_t bit = 1u << (next - 1);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    blocks[i] |= bit;
    set_partitions(n, q, next + 1, blocks, out);
    blocks[i] &= ~bit;
  }
  blocks.push_back(bit);
  set_partitions(n, q, next + 1, blocks, out);
  blocks.pop_back();
}

// every way of cutting a tree into subtrees along an antichain
inline std::vector<std::vector<LabeledTree>> cuts(const LabeledTree& t) {
  std::vector<std::vector<LabeledTree>> out{{t}};
  if (t.is_leaf()) return out;
  std::vector<std::vector<LabeledTree>> acc{{}};
  for (const auto& c : t.children) {
    std::vector<std::vector<LabeledTree>> next;
    for (const auto& a : acc)
      for (const auto& b : cuts(c)) {
        auto v = a;
        v.insert(v.end(), b.begin(), b.end());
        next.push_back(std::move(v));
      }
    acc = std::move(next);
  }
  out.insert(out.end(), acc.begin(), acc.end());
  return out;
}

}  // namespace detail

struct DescLinkPoset {
  GenPoset poset;
  std::vector<SplitRecord> records;  // object i of poset
};

inline constexpr int kDescLinkCap = 6;

namespace detail {

// arrows A -> B whenever cutting B's trees yields A's blocks
inline void add_refinement_arrows(DescLinkPoset& out) {
  std::map<SplitRecord, std::size_t> index;
  for (std::size_t i = 0; i < out.records.size(); ++i) index.emplace(out.records[i], i);
  for (std::size_t b = 0; b < out.records.size(); ++b) {
    std::vector<std::vector<LabeledTree>> acc{{}};
    for (const auto& t : out.records[b].blocks) {
      std::vector<std::vector<LabeledTree>> next;
      for (const auto& a : acc)
        for (const auto& c : cuts(t)) {
          auto v = a;
          v.insert(v.end(), c.begin(), c.end());
          next.push_back(std::move(v));
        }
      acc = std::move(next);
    }
    for (auto& pieces : acc) {
      if (pieces.size() == out.records[b].k()) continue;
      std::sort(pieces.begin(), pieces.end());
      auto it = index.find(SplitRecord{pieces});
      if (it != index.end()) out.poset.add_arrow(it->second, b);
    }
  }
}

}  // namespace detail

/// lk(X) for X of level n: split maps kB -> nB, k < n, modulo transformations
/// of the domain, with arrows given by merge maps. Independent of r.
inline DescLinkPoset enumerate_desc_link(const Config& config, int n, int cap = kDescLinkCap) {
  if (n > cap) throw CapExceeded("enumerate_desc_link: n=" + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
  if (n > 31) throw CapExceeded("enumerate_desc_link: n must be < 32");
  DescLinkPoset out;
  if (n < 2) return out;
  detail::TreeTable table(config);
  std::vector<std::vector<std::uint32_t>> parts;
  std::vector<std::uint32_t> blocks;
  detail::set_partitions(n, config.q, 1, blocks, parts);
  std::set<SplitRecord> records;
  for (const auto& p : parts) {
    if (static_cast<int>(p.size()) == n) continue;
    std::vector<std::vector<LabeledTree>> acc{{}};
    for (auto b : p) {
      std::vector<std::vector<LabeledTree>> next;
      for (const auto& a : acc)
        for (const auto& t : table.trees(b)) {
          auto v = a;
          v.push_back(t);
          next.push_back(std::move(v));
        }
      acc = std::move(next);
    }
    for (auto& a : acc) records.insert(make_record(std::move(a), config.D));
  }
  out.records.assign(records.begin(), records.end());
  for (const auto& r : out.records) out.poset.add_object(r.id());
  detail::add_refinement_arrows(out);
  return out;
}

/// lk*(X): the very elementary split maps only, enumerated directly.
inline DescLinkPoset enumerate_desc_link_star(const Config& config, int n, int cap = kDescLinkCap) {
  if (n > cap) throw CapExceeded("enumerate_desc_link_star: n=" + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
  if (n > 31) throw CapExceeded("enumerate_desc_link_star: n must be < 32");
  DescLinkPoset out;
  const int q = config.q;
  if (n < q) return out;
  // a decorated q-block: children labeled in the order given by a coset rep
  auto reps = config.D.left_coset_reps();
  std::set<SplitRecord> records;
  std::vector<std::vector<int>> qsets;
  std::vector<int> cur;
  detail::subsets(n, q, 1, cur, qsets);
  // choose pairwise disjoint decorated q-sets (at least one)
  std::vector<LabeledTree> chosen;
  auto rec = [&](auto&& self, std::size_t from, std::uint32_t used) -> void {
    if (!chosen.empty()) {
      auto blocks = chosen;
      for (int i = 1; i <= n; ++i)
        if (!(used >> (i - 1) & 1u)) blocks.push_back(LabeledTree{i, {}});
      records.insert(make_record(std::move(blocks), config.D));
    }
    for (std::size_t s = from; s < qsets.size(); ++s) {
      std::uint32_t m = 0;
      for (int e : qsets[s]) m |= 1u << (e - 1);
      if (m & used) continue;
      for (const auto& p : reps) {
        LabeledTree t;
        for (int i = 0; i < q; ++i) t.children.push_back(LabeledTree{qsets[s][static_cast<std::size_t>(p(i))], {}});
        chosen.push_back(std::move(t));
        self(self, s + 1, used | m);
        chosen.pop_back();
      }
    }
  };
  rec(rec, 0, 0);
  out.records.assign(records.begin(), records.end());
  for (const auto& r : out.records) out.poset.add_object(r.id());
  detail::add_refinement_arrows(out);
  return out;
}

/// Index of each lk* record in the full lk enumeration.
inline std::vector<std::size_t> star_inclusion(const DescLinkPoset& star, const DescLinkPoset& full) {
  std::map<SplitRecord, std::size_t> index;
  for (std::size_t i = 0; i < full.records.size(); ++i) index.emplace(full.records[i], i);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < star.records.size(); ++i) {
    auto it = index.find(star.records[i]);
    if (it == index.end()) throw CheckFailed("star_inclusion: record " + star.records[i].id() + " missing from lk");
    out.push_back(it->second);
    for (std::size_t j = 0; j < star.records.size(); ++j)
      if (i != j && star.poset.has_arrow(i, j) != full.poset.has_arrow(it->second, index.at(star.records[j])))
        throw CheckFailed("star_inclusion: lk* is not a full subposet of lk");
  }
  return out;
}

/// Poset of nonempty simplices of C_n under inclusion (the barycentric model).
inline GenPoset face_poset(const DecoratedComplex& c) {
  auto cells = cliques(c.graph(), static_cast<int>(c.vertices.size()));
  GenPoset out;
  std::map<Simplex, std::size_t> index;
  for (const auto& dim : cells)
    for (const auto& s : dim) {
      std::string id;
      for (auto v : s) id += (id.empty() ? "" : ",") + std::to_string(v);
      index.emplace(s, out.add_object("{" + id + "}"));
    }
  for (const auto& [s, i] : index)
    for (const auto& [t, j] : index)
      if (s.size() < t.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) out.add_arrow(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// Partition poset of a split record that is not very elementary

struct PartitionPoset {
  GenPoset poset;                                 // arrow P1 -> P2 when P1 refines P2
  std::vector<std::vector<Address>> partitions;  // balls of kB, sorted
  std::size_t p_nu = 0;
  std::vector<std::size_t> F;
};

namespace detail {

inline void tree_cuts(const LabeledTree& t, const Address& at, std::vector<std::vector<Address>>& out) {
  out.push_back({at});
  if (t.is_leaf()) return;
  std::vector<std::vector<Address>> acc{{}};
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    std::vector<std::vector<Address>> sub;
    tree_cuts(t.children[i], at.child(static_cast<int>(i)), sub);
    std::vector<std::vector<Address>> next;
    for (const auto& a : acc)
      for (const auto& b : sub) {
        auto v = a;
        v.insert(v.end(), b.begin(), b.end());
        next.push_back(std::move(v));
      }
    acc = std::move(next);
  }
  out.insert(out.end(), acc.begin(), acc.end());
}

inline bool refines(const std::vector<Address>& fine, const std::vector<Address>& coarse) {
  return std::all_of(fine.begin(), fine.end(), [&](const Address& a) {
    return std::any_of(coarse.begin(), coarse.end(), [&](const Address& b) { return b.is_prefix_of(a); });
  });
}

inline std::vector<Address> root_split(const std::vector<bool>& split, int q) {
  std::vector<Address> out;
  for (std::size_t s = 0; s < split.size(); ++s) {
    Address root{static_cast<int>(s) + 1, {}};
    if (!split[s]) {
      out.push_back(root);
      continue;
    }
    for (int i = 0; i < q; ++i) out.push_back(root.child(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Verifies P >= F(P), F order preserving and P_nu >= F(P) for all P.
inline std::optional<std::string> check_cone_relations(const PartitionPoset& pp) {
  const auto& P = pp.partitions;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (!detail::refines(P[i], P[pp.F[i]])) return "P >= F(P) fails at " + pp.poset.id(i);
    if (!detail::refines(P[pp.p_nu], P[pp.F[i]])) return "P_nu >= F(P) fails at " + pp.poset.id(i);
    for (std::size_t j = 0; j < P.size(); ++j)
      if (detail::refines(P[i], P[j]) && !detail::refines(P[pp.F[i]], P[pp.F[j]]))
        return "F is not order preserving on " + pp.poset.id(i) + " >= " + pp.poset.id(j);
  }
  return std::nullopt;
}

inline PartitionPoset partition_poset(const SplitRecord& nu, const Config& config) {
  const int q = config.q;
  if (nu.very_elementary(q)) throw InvalidArgument("partition_poset: " + nu.id() + " is very elementary");
  std::vector<std::vector<Address>> acc{{}};
  for (std::size_t s = 0; s < nu.k(); ++s) {
    std::vector<std::vector<Address>> sub;
    detail::tree_cuts(nu.blocks[s], Address{static_cast<int>(s) + 1, {}}, sub);
    std::vector<std::vector<Address>> next;
    for (const auto& a : acc)
      for (const auto& b : sub) {
        auto v = a;
        v.insert(v.end(), b.begin(), b.end());
        next.push_back(std::move(v));
      }
    acc = std::move(next);
  }
  const std::size_t k = nu.k(), n = nu.n();
  PartitionPoset pp;
  std::map<std::vector<Address>, std::size_t> index;
  for (auto& p : acc) {
    // the trivial partition and the full split are not descending
    if (p.size() == k || p.size() == n) continue;
    std::sort(p.begin(), p.end());
    std::string id;
    for (const auto& a : p) id += (id.empty() ? "" : " ") + a.str();
    index.emplace(p, pp.poset.add_object(id));
    pp.partitions.push_back(p);
  }
  for (std::size_t i = 0; i < pp.partitions.size(); ++i)
    for (std::size_t j = 0; j < pp.partitions.size(); ++j)
      if (i != j && detail::refines(pp.partitions[i], pp.partitions[j])) pp.poset.add_arrow(i, j);

  auto lookup = [&](const std::vector<Address>& p, const std::string& what) {
    auto it = index.find(p);
    if (it == index.end()) throw CheckFailed("partition_poset: " + what + " is not in the poset");
    return it->second;
  };
  std::vector<bool> split(k);
  for (std::size_t s = 0; s < k; ++s) split[s] = !nu.blocks[s].is_leaf();
  pp.p_nu = lookup(detail::root_split(split, q), "P_nu");
  for (const auto& p : pp.partitions) {
    std::vector<bool> divided(k, false);
    for (const auto& a : p)
      if (a.depth() > 0) divided[static_cast<std::size_t>(a.summand - 1)] = true;
    pp.F.push_back(lookup(detail::root_split(divided, q), "F(P)"));
  }
  if (auto bad = check_cone_relations(pp)) throw CheckFailed("partition_poset: " + *bad);
  return pp;
}

}  // namespace neretin
