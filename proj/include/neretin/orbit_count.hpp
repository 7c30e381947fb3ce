#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "neretin/genposet.hpp"
#include "neretin/spheromorphism.hpp"
#include "neretin/split_record.hpp"

namespace neretin {

inline constexpr int kOrbitCountCap = 3;

/// Levels carrying sphero-vertices nB -> rB: n = r mod (q-1).
inline bool level_exists(const Config& c, int n) { return n >= 1 && (n - c.r) % (c.q - 1) == 0; }

namespace detail {

// Objects of Q reachable from a fixed object X0 of level n0, normalized
// modulo strict transformations: ordered forests of canonical labeled trees
// on the labels 1..n0. Object 0 is X0 itself.
struct ForestGraph {
  std::vector<std::vector<LabeledTree>> forests;
  std::vector<std::vector<std::size_t>> out;  // non-identity arrows
};

inline ForestGraph reachable_forests(const Config& config, int n0) {
  TreeTable table(config);
  std::vector<std::vector<std::uint32_t>> parts;
  std::vector<std::uint32_t> blocks;
  set_partitions(n0, config.q, 1, blocks, parts);
  ForestGraph g;
  std::vector<LabeledTree> x0;
  for (int i = 1; i <= n0; ++i) x0.push_back(LabeledTree{i, {}});
  g.forests.push_back(x0);
  std::set<std::vector<LabeledTree>> seen{x0};
  for (const auto& p : parts) {
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
    for (auto& f : acc) {
      std::sort(f.begin(), f.end());
      do {
        if (seen.insert(f).second) g.forests.push_back(f);
      } while (std::next_permutation(f.begin(), f.end()));
    }
  }
  // F -> G iff cutting G's trees gives F's trees
  std::map<std::vector<LabeledTree>, std::vector<std::size_t>> by_multiset;
  for (std::size_t i = 0; i < g.forests.size(); ++i) {
    auto key = g.forests[i];
    std::sort(key.begin(), key.end());
    by_multiset[key].push_back(i);
  }
  g.out.assign(g.forests.size(), {});
  for (std::size_t b = 0; b < g.forests.size(); ++b) {
    std::vector<std::vector<LabeledTree>> acc{{}};
    for (const auto& t : g.forests[b]) {
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
      std::sort(pieces.begin(), pieces.end());
      auto it = by_multiset.find(pieces);
      if (it == by_multiset.end()) continue;
      for (auto a : it->second)
        if (a != b) g.out[a].push_back(b);
    }
  }
  for (auto& o : g.out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  return g;
}

}  // namespace detail

/// Number of A-orbits of nondegenerate d-chains X0 -> ... -> Xd in the nerve
/// of Q(k). Objects of one level form a single orbit and the stabilizer of X0
/// fixes everything below it, so the count is the number of such chains out
/// of one fixed object per level.
inline std::uint64_t count_equivariant_cells(const Config& config, int k, int d, int cap = kOrbitCountCap) {
  if (k < 1) throw InvalidArgument("count_equivariant_cells: k must be >= 1");
  if (d < 0) throw InvalidArgument("count_equivariant_cells: d must be >= 0");
  if (d > 0 && k > cap)
    throw CapExceeded("count_equivariant_cells: k=" + std::to_string(k) + " exceeds the cap " + std::to_string(cap));
  std::uint64_t total = 0;
  for (int n0 = 1; n0 <= k; ++n0) {
    if (!level_exists(config, n0)) continue;
    if (d == 0) {
      ++total;
      continue;
    }
    auto g = detail::reachable_forests(config, n0);
    std::vector<std::uint64_t> ways(g.forests.size(), 0);
    ways[0] = 1;
    for (int step = 0; step < d; ++step) {
      std::vector<std::uint64_t> next(ways.size(), 0);
      for (std::size_t a = 0; a < ways.size(); ++a)
        if (ways[a])
          for (auto b : g.out[a]) next[b] += ways[a];
      ways = std::move(next);
    }
    for (auto w : ways) total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// A finite truncation of Q for fixed-set checks

/// Objects [psi] of Q with psi sending each domain summand onto one ball of
/// a partition of rB of depth <= max_depth (decorations normalized away),
/// arrows computed from classify_arrow.
struct QTruncation {
  Config config;
  std::vector<Spheromorphism> objects;
  GenPoset poset;
};

namespace detail {

inline void partitions_of_summand(int q, const Address& at, int depth_left, std::vector<std::vector<Address>>& out) {
  out.push_back({at});
  if (depth_left == 0) return;
  std::vector<std::vector<Address>> acc{{}};
  for (int i = 0; i < q; ++i) {
    std::vector<std::vector<Address>> sub;
    partitions_of_summand(q, at.child(i), depth_left - 1, sub);
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

}  // namespace detail

inline QTruncation q_truncation(const Config& config, int max_depth, int max_level) {
  if (max_depth < 0 || max_level < 1) throw InvalidArgument("q_truncation: bad bounds");
  std::vector<std::vector<Address>> acc{{}};
  for (int s = 1; s <= config.r; ++s) {
    std::vector<std::vector<Address>> sub;
    detail::partitions_of_summand(config.q, Address{s, {}}, max_depth, sub);
    std::vector<std::vector<Address>> next;
    for (const auto& a : acc)
      for (const auto& b : sub) {
        auto v = a;
        v.insert(v.end(), b.begin(), b.end());
        next.push_back(std::move(v));
      }
    acc = std::move(next);
  }
  QTruncation t;
  t.config = config;
  for (auto& leaves : acc) {
    const int m = static_cast<int>(leaves.size());
    if (m > max_level) continue;
    std::sort(leaves.begin(), leaves.end());
    do {
      std::vector<Spheromorphism::Piece> pieces;
      for (int i = 0; i < m; ++i)
        pieces.push_back({Address{i + 1, {}}, leaves[static_cast<std::size_t>(i)], LabeledIsometry(config.q)});
      t.objects.push_back(Spheromorphism::from_pieces(config, m, config.r, std::move(pieces)));
    } while (std::next_permutation(leaves.begin(), leaves.end()));
  }
  std::vector<Spheromorphism> inverses;
  for (std::size_t i = 0; i < t.objects.size(); ++i) {
    std::string id;
    for (const auto& p : t.objects[i].pieces()) id += (id.empty() ? "" : " ") + p.codomain.str();
    t.poset.add_object(id);
    inverses.push_back(inverse(t.objects[i]));
  }
  for (std::size_t a = 0; a < t.objects.size(); ++a)
    for (std::size_t b = 0; b < t.objects.size(); ++b) {
      if (a == b || t.objects[a].level() < t.objects[b].level()) continue;
      auto kind = classify_arrow(compose(inverses[b], t.objects[a]));
      if (is_merge(kind) || is_transformation(kind)) t.poset.add_arrow(a, b);
    }
  return t;
}

/// Elements of Isom_D(B) acting only at vertices of depth < depth, as
/// portraits (the finite quotient W_depth).
inline std::vector<LabeledIsometry> depth_quotient(const Config& config, int depth) {
  std::vector<Word> vertices{{}};
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (static_cast<int>(vertices[i].size()) + 1 < depth)
      for (int c = 0; c < config.q; ++c) {
        auto w = vertices[i];
        w.push_back(static_cast<std::uint8_t>(c));
        vertices.push_back(std::move(w));
      }
  if (depth <= 0) return {LabeledIsometry(config.q)};
  std::vector<LabeledIsometry> out{LabeledIsometry(config.q)};
  for (const auto& v : vertices) {
    std::vector<LabeledIsometry> next;
    for (const auto& base : out)
      for (const auto& p : config.D.elements()) {
        auto l = base;
        l.set(v, p);
        next.push_back(std::move(l));
      }
    out = std::move(next);
  }
  return out;
}

/// Closure of the given portraits under composition.
inline std::vector<LabeledIsometry> generated_subgroup(const std::vector<LabeledIsometry>& gens, int q) {
  std::map<std::map<Word, Perm>, LabeledIsometry> seen;
  LabeledIsometry id(q);
  seen.emplace(id.labels(), id);
  std::vector<LabeledIsometry> frontier{id};
  while (!frontier.empty()) {
    std::vector<LabeledIsometry> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        auto y = compose(g, x);
        if (seen.emplace(y.labels(), y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  std::vector<LabeledIsometry> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

/// All distinct subgroups of a finite portrait group generated by at most
/// two elements.
inline std::vector<std::vector<LabeledIsometry>> small_subgroups(const std::vector<LabeledIsometry>& group, int q) {
  std::set<std::vector<std::map<Word, Perm>>> keys;
  std::vector<std::vector<LabeledIsometry>> out;
  auto add = [&](const std::vector<LabeledIsometry>& gens) {
    auto h = generated_subgroup(gens, q);
    std::vector<std::map<Word, Perm>> key;
    for (const auto& x : h) key.push_back(x.labels());
    if (keys.insert(key).second) out.push_back(std::move(h));
  };
  add({});
  for (std::size_t i = 0; i < group.size(); ++i)
    for (std::size_t j = i; j < group.size(); ++j) add({group[i], group[j]});
  return out;
}

/// The group element acting by the same portrait on every summand.
inline Spheromorphism diagonal_element(const Config& config, const LabeledIsometry& l) {
  std::vector<Spheromorphism::Piece> pieces;
  for (int s = 1; s <= config.r; ++s) pieces.push_back({Address{s, {}}, Address{s, {}}, l});
  return Spheromorphism::from_pieces(config, config.r, config.r, std::move(pieces));
}

inline std::vector<bool> fixed_objects(const QTruncation& t, const std::vector<Spheromorphism>& H) {
  std::vector<bool> out(t.objects.size());
  for (std::size_t i = 0; i < t.objects.size(); ++i)
    out[i] = std::all_of(H.begin(), H.end(), [&](const Spheromorphism& g) { return stabilizer_test(g, t.objects[i]); });
  return out;
}

/// An arrow X -> Y with X fixed and Y not, if any.
inline std::optional<GenPoset::Arrow> upward_closure_violation(const QTruncation& t, const std::vector<bool>& fixed) {
  for (const auto& [a, b] : t.poset.arrows())
    if (fixed[a] && !fixed[b]) return GenPoset::Arrow{a, b};
  return std::nullopt;
}

}  // namespace neretin
