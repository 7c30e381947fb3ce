#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neretin/address.hpp"
#include "neretin/perm.hpp"
#include "neretin/portrait.hpp"

namespace neretin {

/// A D-admissible local similarity mB -> nB in tree-pair form: domain ball
/// i is sent onto codomain ball images[i] by the order-preserving similarity
/// followed by decorations[i]. Elements of the group have m = n = r; sphero-
/// vertices have codomain r and arbitrary domain level.
///
/// Values built through the free functions below are always in canonical
/// form, so structural equality is equality of boundary maps.
class Spheromorphism {
public:
  struct Piece {
    Address domain;
    Address codomain;
    LabeledIsometry decoration;
  };

  Spheromorphism() = default;

  Spheromorphism(Config config, LeafPartition domain, LeafPartition codomain, std::vector<std::size_t> images,
                 std::vector<LabeledIsometry> decorations)
      : config_(std::move(config)),
        domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        images_(std::move(images)),
        decorations_(std::move(decorations)) {
    validate();
  }

  /// Builds from unsorted pieces; the pieces must tile both sides.
  static Spheromorphism from_pieces(const Config& config, int domain_summands, int codomain_summands,
                                    std::vector<Piece> pieces) {
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.domain < b.domain; });
    std::vector<Address> dom, cod;
    for (const auto& p : pieces) {
      dom.push_back(p.domain);
      cod.push_back(p.codomain);
    }
    LeafPartition codomain(config.q, codomain_summands, cod);
    std::vector<std::size_t> images;
    std::vector<LabeledIsometry> decorations;
    for (auto& p : pieces) {
      images.push_back(codomain.index_of(p.codomain));
      decorations.push_back(std::move(p.decoration));
    }
    return Spheromorphism(config, LeafPartition(config.q, domain_summands, dom), std::move(codomain), std::move(images),
                          std::move(decorations));
  }

  static Spheromorphism identity(const Config& config, int summands) {
    std::vector<Piece> pieces;
    for (int s = 1; s <= summands; ++s) pieces.push_back({Address{s, {}}, Address{s, {}}, LabeledIsometry(config.q)});
    return from_pieces(config, summands, summands, std::move(pieces));
  }

  static Spheromorphism identity(const Config& config) { return identity(config, config.r); }

  const Config& config() const { return config_; }
  const LeafPartition& domain() const { return domain_; }
  const LeafPartition& codomain() const { return codomain_; }
  const std::vector<std::size_t>& images() const { return images_; }
  const std::vector<LabeledIsometry>& decorations() const { return decorations_; }
  int domain_summands() const { return domain_.summands(); }
  int codomain_summands() const { return codomain_.summands(); }
  /// Level of a sphero-vertex: the number of domain summands.
  int level() const { return domain_.summands(); }
  std::size_t size() const { return images_.size(); }

  bool is_group_element() const {
    return domain_summands() == config_.r && codomain_summands() == config_.r;
  }

  std::vector<Piece> pieces() const {
    std::vector<Piece> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i)
      out.push_back({domain_.leaves()[i], codomain_.leaves()[images_[i]], decorations_[i]});
    return out;
  }

  /// Image of the ball `x`, defined when x lies at or below a domain leaf.
  std::optional<Address> apply(const Address& x) const {
    auto i = domain_.locate(x);
    if (i == LeafPartition::npos) return std::nullopt;
    const Address& leaf = domain_.leaves()[i];
    Word tail(x.word.begin() + leaf.depth(), x.word.end());
    Address out = codomain_.leaves()[images_[i]];
    Word moved = decorations_[i].apply(tail);
    out.word.insert(out.word.end(), moved.begin(), moved.end());
    return out;
  }

  friend bool operator==(const Spheromorphism& a, const Spheromorphism& b) {
    return a.config_ == b.config_ && a.domain_ == b.domain_ && a.codomain_ == b.codomain_ &&
           a.images_ == b.images_ && a.decorations_ == b.decorations_;
  }

private:
  void validate() const {
    if (domain_.q() != config_.q || codomain_.q() != config_.q) throw InvalidArgument("partition q differs from config");
    if (domain_.size() != codomain_.size())
      throw InvalidArgument("domain and codomain have different numbers of leaves");
    if (images_.size() != domain_.size() || decorations_.size() != domain_.size())
      throw InvalidArgument("leaf map and decorations must have one entry per domain leaf");
    std::vector<bool> hit(codomain_.size(), false);
    for (auto i : images_) {
      if (i >= codomain_.size() || hit[i]) throw InvalidArgument("leaf map is not a bijection");
      hit[i] = true;
    }
    for (const auto& d : decorations_) {
      if (d.q() != config_.q) throw InvalidArgument("decoration has wrong degree");
      if (!d.labels_in(config_.D)) throw InvalidArgument("decoration label outside D");
    }
  }

  Config config_;
  LeafPartition domain_;
  LeafPartition codomain_;
  std::vector<std::size_t> images_;
  std::vector<LabeledIsometry> decorations_;
};

using GroupElement = Spheromorphism;
using SpheroVertex = Spheromorphism;

namespace detail {

inline std::vector<Spheromorphism::Piece> expand_piece(const Spheromorphism::Piece& p, int q) {
  std::vector<Spheromorphism::Piece> out;
  Perm root = p.decoration.label({});
  for (int d = 0; d < q; ++d)
    out.push_back({p.domain.child(d), p.codomain.child(root(d)),
                   p.decoration.restrict_to(Word{static_cast<std::uint8_t>(d)})});
  return out;
}

/// Expands pieces until the side selected by `on_domain` equals `target`.
inline std::vector<Spheromorphism::Piece> refine_to(std::vector<Spheromorphism::Piece> pieces, const LeafPartition& target,
                                                     bool on_domain, int q) {
  std::vector<Spheromorphism::Piece> done;
  while (!pieces.empty()) {
    auto p = std::move(pieces.back());
    pieces.pop_back();
    const Address& side = on_domain ? p.domain : p.codomain;
    if (target.contains(side)) {
      done.push_back(std::move(p));
    } else {
      if (target.locate(side) != LeafPartition::npos) throw CheckFailed("refine_to: target is coarser than the pieces");
      for (auto& c : expand_piece(p, q)) pieces.push_back(std::move(c));
    }
  }
  return done;
}

}  // namespace detail

/// Unique representative without reducible cherries: q sibling domain
/// leaves sent onto the q children of one codomain vertex by a child
/// permutation in D are merged into their parent.
inline Spheromorphism canonical_form(const Spheromorphism& g) {
  const int q = g.config().q;
  auto pieces = g.pieces();
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Address, std::vector<std::size_t>> by_parent;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (pieces[i].domain.depth() > 0 && pieces[i].codomain.depth() > 0)
        by_parent[pieces[i].domain.parent()].push_back(i);

    std::vector<bool> removed(pieces.size(), false);
    std::vector<Spheromorphism::Piece> merged;
    for (const auto& [parent, idx] : by_parent) {
      if (static_cast<int>(idx.size()) != q) continue;
      Address cod_parent = pieces[idx[0]].codomain.parent();
      std::vector<std::uint8_t> sigma(static_cast<std::size_t>(q));
      std::vector<LabeledIsometry> children(static_cast<std::size_t>(q));
      bool ok = true;
      for (auto i : idx) {
        const auto& p = pieces[i];
        if (p.codomain.depth() == 0 || p.codomain.parent() != cod_parent) {
          ok = false;
          break;
        }
        auto d = static_cast<std::size_t>(p.domain.word.back());
        sigma[d] = p.codomain.word.back();
        children[d] = p.decoration;
      }
      if (!ok) continue;
      Perm s(sigma);
      if (!g.config().D.contains(s)) continue;
      for (auto i : idx) removed[i] = true;
      merged.push_back({parent, cod_parent, LabeledIsometry::graft(s, children)});
      changed = true;
    }
    if (changed) {
      std::vector<Spheromorphism::Piece> next;
      for (std::size_t i = 0; i < pieces.size(); ++i)
        if (!removed[i]) next.push_back(std::move(pieces[i]));
      for (auto& m : merged) next.push_back(std::move(m));
      pieces = std::move(next);
    }
  }
  return Spheromorphism::from_pieces(g.config(), g.domain_summands(), g.codomain_summands(), std::move(pieces));
}

/// g o h (h first). Requires h's codomain space to be g's domain space.
inline Spheromorphism compose(const Spheromorphism& g, const Spheromorphism& h) {
  if (!(g.config() == h.config())) throw InvalidArgument("compose: configurations differ");
  if (h.codomain_summands() != g.domain_summands())
    throw InvalidArgument("compose: codomain of the inner map is not the domain of the outer map");
  const int q = g.config().q;
  LeafPartition mid = common_refinement(h.codomain(), g.domain());
  auto inner = detail::refine_to(h.pieces(), mid, /*on_domain=*/false, q);
  auto outer = detail::refine_to(g.pieces(), mid, /*on_domain=*/true, q);
  std::map<Address, const Spheromorphism::Piece*> outer_by_domain;
  for (const auto& p : outer) outer_by_domain[p.domain] = &p;
  std::vector<Spheromorphism::Piece> pieces;
  pieces.reserve(inner.size());
  for (const auto& p : inner) {
    const auto* o = outer_by_domain.at(p.codomain);
    pieces.push_back({p.domain, o->codomain, compose(o->decoration, p.decoration)});
  }
  return canonical_form(
      Spheromorphism::from_pieces(g.config(), h.domain_summands(), g.codomain_summands(), std::move(pieces)));
}

inline Spheromorphism inverse(const Spheromorphism& g) {
  std::vector<Spheromorphism::Piece> pieces;
  for (const auto& p : g.pieces()) pieces.push_back({p.codomain, p.domain, p.decoration.inverse()});
  return canonical_form(
      Spheromorphism::from_pieces(g.config(), g.codomain_summands(), g.domain_summands(), std::move(pieces)));
}

inline bool equivalent(const Spheromorphism& a, const Spheromorphism& b) {
  return canonical_form(a) == canonical_form(b);
}

/// Splits the domain leaf with index `leaf` into its q children (changes the
/// representative, not the map).
inline Spheromorphism expand_leaf(const Spheromorphism& g, std::size_t leaf) {
  auto pieces = g.pieces();
  auto kids = detail::expand_piece(pieces.at(leaf), g.config().q);
  pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(leaf));
  pieces.insert(pieces.end(), kids.begin(), kids.end());
  return Spheromorphism::from_pieces(g.config(), g.domain_summands(), g.codomain_summands(), std::move(pieces));
}

/// The group element acting by a single child permutation at one vertex.
inline Spheromorphism single_label(const Config& config, int summands, const Address& at, const Perm& label) {
  std::vector<Spheromorphism::Piece> pieces;
  for (int s = 1; s <= summands; ++s) {
    LabeledIsometry dec(config.q);
    if (s == at.summand) dec.set(at.word, label);
    pieces.push_back({Address{s, {}}, Address{s, {}}, std::move(dec)});
  }
  return Spheromorphism::from_pieces(config, summands, summands, std::move(pieces));
}

// ---------------------------------------------------------------------------
// Decision procedures

inline constexpr int kUnbounded = INT_MAX;

/// Largest k with g in (U^D_k)^r (fixes every vertex of depth <= k), the
/// unbounded sentinel for the identity, nullopt outside Isom_D(B)^r.
inline std::optional<int> depth_triviality(const Spheromorphism& g) {
  auto c = canonical_form(g);
  if (c.domain_summands() != c.codomain_summands()) return std::nullopt;
  int best = kUnbounded;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& dom = c.domain().leaves()[i];
    const auto& cod = c.codomain().leaves()[c.images()[i]];
    if (dom.depth() != 0 || cod.depth() != 0 || dom.summand != cod.summand) return std::nullopt;
    int d = c.decorations()[i].first_label_depth();
    if (d >= 0) best = std::min(best, d);
  }
  return best;
}

enum class ArrowKind { Merge, VeryElementaryMerge, Transformation, StrictTransformation, NotAnArrow };

inline std::string to_string(ArrowKind k) {
  switch (k) {
    case ArrowKind::Merge: return "Merge";
    case ArrowKind::VeryElementaryMerge: return "VeryElementaryMerge";
    case ArrowKind::Transformation: return "Transformation";
    case ArrowKind::StrictTransformation: return "StrictTransformation";
    case ArrowKind::NotAnArrow: return "NotAnArrow";
  }
  return "NotAnArrow";
}

/// Most specific arrow kind of a local similarity nB -> mB.
inline ArrowKind classify_arrow(const Spheromorphism& alpha) {
  auto c = canonical_form(alpha);
  const int n = c.domain_summands();
  const int m = c.codomain_summands();
  for (const auto& l : c.domain().leaves())
    if (l.depth() != 0) return ArrowKind::NotAnArrow;
  if (n == m) {
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.codomain().leaves()[c.images()[i]].summand != c.domain().leaves()[i].summand)
        return ArrowKind::Transformation;
    return ArrowKind::StrictTransformation;
  }
  if (n < m) return ArrowKind::NotAnArrow;
  std::vector<int> preimages(static_cast<std::size_t>(m) + 1, 0);
  for (const auto& l : c.codomain().leaves()) ++preimages[static_cast<std::size_t>(l.summand)];
  for (int t = 1; t <= m; ++t) {
    int p = preimages[static_cast<std::size_t>(t)];
    if (p != 1 && p != c.config().q) return ArrowKind::Merge;
  }
  return ArrowKind::VeryElementaryMerge;
}

inline bool is_merge(ArrowKind k) { return k == ArrowKind::Merge || k == ArrowKind::VeryElementaryMerge; }
inline bool is_transformation(ArrowKind k) {
  return k == ArrowKind::Transformation || k == ArrowKind::StrictTransformation;
}

/// Whether gamma fixes [phi] in the quotient by strict transformations,
/// i.e. phi^-1 o gamma o phi is a strict transformation.
inline bool stabilizer_test(const Spheromorphism& gamma, const Spheromorphism& phi) {
  if (!(gamma.config() == phi.config())) throw InvalidArgument("stabilizer_test: configurations differ");
  auto conj = compose(inverse(phi), compose(gamma, phi));
  return classify_arrow(conj) == ArrowKind::StrictTransformation;
}

namespace detail {

inline bool conjugate_lands_in(const Spheromorphism& phi, const Spheromorphism& phi_inv, const Address& at,
                               const Perm& label, int k) {
  auto gen = single_label(phi.config(), phi.domain_summands(), at, label);
  auto conj = compose(phi, compose(gen, phi_inv));
  if (classify_arrow(conj) != ArrowKind::StrictTransformation) return false;
  auto depth = depth_triviality(conj);
  return depth && *depth >= k;
}

inline void internal_vertices(const LeafPartition& p, std::vector<Address>& out) {
  std::set<Address> seen;
  for (const auto& l : p.leaves()) {
    Address a = l;
    while (a.depth() > 0) {
      a = a.parent();
      if (!seen.insert(a).second) break;
    }
  }
  out.assign(seen.begin(), seen.end());
}

}  // namespace detail

/// Minimal k' >= 0 with phi (U^D_k')^m phi^-1 contained in (U^D_k)^n.
///
/// Containment of the generated group is decided on the single-label
/// generators at vertices of depth >= k'. Below a domain leaf only the
/// shallowest such vertex matters, so the check is finite.
inline int subnormal_depth(const Spheromorphism& phi, int k) {
  if (k < 0) throw InvalidArgument("subnormal_depth: k must be >= 0");
  const auto& gens = phi.config().D.generators();
  if (gens.empty()) return 0;
  auto c = canonical_form(phi);
  auto c_inv = inverse(c);
  std::vector<Address> internal;
  detail::internal_vertices(c.domain(), internal);

  int upper = c.domain().max_depth();
  for (std::size_t i = 0; i < c.size(); ++i) {
    int offset = k - c.codomain().leaves()[c.images()[i]].depth() + c.domain().leaves()[i].depth();
    upper = std::max(upper, offset);
  }

  for (int kp = 0; kp < upper; ++kp) {
    bool ok = true;
    for (std::size_t i = 0; ok && i < c.size(); ++i) {
      Address below = c.domain().leaves()[i];
      while (below.depth() < kp) below = below.child(0);
      for (const auto& g : gens)
        if (!detail::conjugate_lands_in(c, c_inv, below, g, k)) {
          ok = false;
          break;
        }
    }
    for (const auto& w : internal) {
      if (!ok) break;
      if (w.depth() < kp) continue;
      for (const auto& g : gens)
        if (!detail::conjugate_lands_in(c, c_inv, w, g, k)) {
          ok = false;
          break;
        }
    }
    if (ok) return kp;
  }
  return upper;
}

struct ThompsonFlags {
  bool in_v = false;
  bool in_f = false;
};

/// Membership in the canonically embedded Higman-Thompson groups V and F.
inline ThompsonFlags thompson_membership(const Spheromorphism& g) {
  auto c = canonical_form(g);
  ThompsonFlags f;
  f.in_v = std::all_of(c.decorations().begin(), c.decorations().end(),
                       [](const LabeledIsometry& d) { return d.is_identity(); });
  if (!f.in_v) return f;
  f.in_f = true;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.images()[i] != i) f.in_f = false;
  return f;
}

}  // namespace neretin
