#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "neretin/spheromorphism.hpp"

namespace oracle {

using namespace neretin;

/// Boundary action computed straight from the raw tree-pair data by
/// walking the label map digit by digit.
inline std::optional<Address> apply(const Spheromorphism& g, const Address& x) {
  for (std::size_t i = 0; i < g.domain().leaves().size(); ++i) {
    const Address& leaf = g.domain().leaves()[i];
    if (leaf.summand != x.summand || leaf.word.size() > x.word.size()) continue;
    if (!std::equal(leaf.word.begin(), leaf.word.end(), x.word.begin())) continue;
    Address out = g.codomain().leaves()[g.images()[i]];
    const auto& labels = g.decorations()[i].labels();
    Word path;
    for (std::size_t p = leaf.word.size(); p < x.word.size(); ++p) {
      auto it = labels.find(path);
      int digit = x.word[p];
      out.word.push_back(static_cast<std::uint8_t>(it == labels.end() ? digit : it->second.images()[digit]));
      path.push_back(x.word[p]);
    }
    return out;
  }
  return std::nullopt;
}

/// Inverse boundary action: locate the codomain leaf above x and undo the
/// decoration labels digit by digit (labels are indexed by domain paths).
inline std::optional<Address> apply_inverse(const Spheromorphism& g, const Address& x) {
  for (std::size_t i = 0; i < g.domain().leaves().size(); ++i) {
    const Address& leaf = g.codomain().leaves()[g.images()[i]];
    if (leaf.summand != x.summand || leaf.word.size() > x.word.size()) continue;
    if (!std::equal(leaf.word.begin(), leaf.word.end(), x.word.begin())) continue;
    Address out = g.domain().leaves()[i];
    const auto& labels = g.decorations()[i].labels();
    Word path;
    for (std::size_t p = leaf.word.size(); p < x.word.size(); ++p) {
      auto it = labels.find(path);
      int digit = x.word[p];
      if (it != labels.end()) {
        const auto& im = it->second.images();
        digit = static_cast<int>(std::find(im.begin(), im.end(), x.word[p]) - im.begin());
      }
      out.word.push_back(static_cast<std::uint8_t>(digit));
      path.push_back(static_cast<std::uint8_t>(digit));
    }
    return out;
  }
  return std::nullopt;
}

inline std::vector<Word> words_of_length(int q, int len) {
  std::vector<Word> out{Word{}};
  for (int l = 0; l < len; ++l) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (int d = 0; d < q; ++d) {
        Word v = w;
        v.push_back(static_cast<std::uint8_t>(d));
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

inline std::vector<Address> addresses_at_depth(int q, int summands, int depth) {
  std::vector<Address> out;
  for (int s = 1; s <= summands; ++s)
    for (auto& w : words_of_length(q, depth)) out.push_back(Address{s, std::move(w)});
  return out;
}

/// Random complete prefix code over `summands` copies with `leaves` leaves
/// (leaves must be congruent to summands mod q-1) and depth at most max_depth.
inline std::vector<Address> random_partition(std::mt19937_64& rng, int q, int summands, std::size_t leaves,
                                             int max_depth) {
  std::vector<Address> out;
  for (int s = 1; s <= summands; ++s) out.push_back(Address{s, {}});
  while (out.size() < leaves) {
    std::vector<std::size_t> splittable;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].depth() < max_depth) splittable.push_back(i);
    if (splittable.empty()) break;
    std::size_t i = splittable[std::uniform_int_distribution<std::size_t>(0, splittable.size() - 1)(rng)];
    Address a = out[i];
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
    for (int d = 0; d < q; ++d) out.push_back(a.child(d));
  }
  return out;
}

inline LabeledIsometry random_isometry(std::mt19937_64& rng, const PermGroup& d, int max_depth, int count) {
  LabeledIsometry iso(d.degree());
  if (d.order() <= 1) return iso;
  for (int c = 0; c < count; ++c) {
    int depth = std::uniform_int_distribution<int>(0, max_depth)(rng);
    Word w;
    for (int i = 0; i < depth; ++i)
      w.push_back(static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, d.degree() - 1)(rng)));
    iso.set(w, d.elements()[std::uniform_int_distribution<std::size_t>(0, d.order() - 1)(rng)]);
  }
  return iso;
}

/// Random local similarity mB -> nB with partitions of depth <= max_depth.
inline Spheromorphism random_map(std::mt19937_64& rng, const Config& c, int m, int n, int max_depth,
                                 int label_depth = 2) {
  const int q = c.q;
  if ((m - n) % (q - 1) != 0) throw InvalidArgument("no local similarity between these levels");
  for (;;) {
    // pick a leaf count reachable from both sides
    std::size_t lo = static_cast<std::size_t>(std::max(m, n));
    std::size_t count = lo + static_cast<std::size_t>(q - 1) * std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    auto dom = random_partition(rng, q, m, count, max_depth);
    auto cod = random_partition(rng, q, n, count, max_depth);
    if (dom.size() != count || cod.size() != count) continue;
    std::shuffle(cod.begin(), cod.end(), rng);
    std::vector<Spheromorphism::Piece> pieces;
    for (std::size_t i = 0; i < count; ++i)
      pieces.push_back({dom[i], cod[i], random_isometry(rng, c.D, label_depth, 1)});
    return Spheromorphism::from_pieces(c, m, n, std::move(pieces));
  }
}

/// Checks that `f` (a function on addresses of one depth) is a strict
/// transformation fixing every vertex of depth <= k, by testing that images
/// keep length, truncate consistently at every level and stay in summand,
/// and that every induced child permutation is one of `allowed`.
template <class F>
bool is_strict_and_fixes(F f, int q, int summands, int depth, int k, const std::vector<Perm>& allowed) {
  auto points = addresses_at_depth(q, summands, depth);
  std::vector<Address> images;
  std::set<Address> seen;
  for (const auto& x : points) {
    auto y = f(x);
    if (!y || y->summand != x.summand || y->depth() != depth) return false;
    for (int j = 0; j < std::min(k, depth); ++j)
      if (y->word[static_cast<std::size_t>(j)] != x.word[static_cast<std::size_t>(j)]) return false;
    if (!seen.insert(*y).second) return false;
    images.push_back(*y);
  }
  for (int j = depth - 1; j >= 1; --j) {
    std::map<Address, Address> induced;
    for (std::size_t i = 0; i < points.size(); ++i) {
      Address a{points[i].summand, Word(points[i].word.begin(), points[i].word.begin() + j)};
      Address b{images[i].summand, Word(images[i].word.begin(), images[i].word.begin() + j)};
      auto [it, fresh] = induced.emplace(a, b);
      if (!fresh && it->second != b) return false;
    }
  }
  std::map<Address, std::vector<std::uint8_t>> local;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int j = 0; j < depth; ++j) {
      Address a{points[i].summand, Word(points[i].word.begin(), points[i].word.begin() + j)};
      auto& sigma = local.try_emplace(a, static_cast<std::size_t>(q), 0).first->second;
      sigma[points[i].word[static_cast<std::size_t>(j)]] = images[i].word[static_cast<std::size_t>(j)];
    }
  for (const auto& [a, sigma] : local)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const Perm& p) { return p.images() == sigma; })) return false;
  return true;
}

}  // namespace oracle
