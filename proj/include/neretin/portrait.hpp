#pragma once

#include <map>
#include <set>
#include <utility>

#include "neretin/address.hpp"
#include "neretin/perm.hpp"

namespace neretin {

/// A finitely supported labeled isometry of one rooted q-ary tree: the label
/// at vertex w permutes the children of w. Labels off the support are the
/// identity; identity labels are never stored.
class LabeledIsometry {
public:
  LabeledIsometry() = default;

  explicit LabeledIsometry(int q) : q_(q) {}

  LabeledIsometry(int q, std::map<Word, Perm> labels) : q_(q) {
    for (auto& [w, p] : labels) set(w, p);
  }

  static LabeledIsometry single(int q, Word at, Perm label) {
    LabeledIsometry l(q);
    l.set(std::move(at), std::move(label));
    return l;
  }

  int q() const { return q_; }
  bool is_identity() const { return labels_.empty(); }
  const std::map<Word, Perm>& labels() const { return labels_; }

  void set(Word at, Perm label) {
    if (label.degree() != q_) throw InvalidArgument("label " + label.str() + " has wrong degree");
    if (label.is_identity())
      labels_.erase(at);
    else
      labels_[std::move(at)] = std::move(label);
  }

  Perm label(const Word& at) const {
    auto it = labels_.find(at);
    return it == labels_.end() ? Perm::identity(q_) : it->second;
  }

  /// Image of a finite word (a vertex).
  Word apply(const Word& w) const {
    Word out(w.size());
    Word prefix;
    prefix.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      auto it = labels_.find(prefix);
      out[i] = it == labels_.end() ? w[i] : static_cast<std::uint8_t>(it->second(w[i]));
      prefix.push_back(w[i]);
    }
    return out;
  }

  /// Restriction to the subtree below `at`, re-rooted.
  LabeledIsometry restrict_to(const Word& at) const {
    LabeledIsometry r(q_);
    for (auto it = labels_.lower_bound(at); it != labels_.end() && is_prefix(at, it->first); ++it)
      r.labels_.emplace(Word(it->first.begin() + static_cast<std::ptrdiff_t>(at.size()), it->first.end()), it->second);
    return r;
  }

  LabeledIsometry inverse() const {
    LabeledIsometry r(q_);
    for (const auto& [w, p] : labels_) r.labels_.emplace(apply(w), p.inverse());
    return r;
  }

  /// Root label `root`, and `children[d]` grafted below digit d.
  static LabeledIsometry graft(const Perm& root, const std::vector<LabeledIsometry>& children) {
    LabeledIsometry r(root.degree());
    r.set({}, root);
    for (std::size_t d = 0; d < children.size(); ++d)
      for (const auto& [w, p] : children[d].labels_) {
        Word full{static_cast<std::uint8_t>(d)};
        full.insert(full.end(), w.begin(), w.end());
        r.labels_.emplace(std::move(full), p);
      }
    return r;
  }

  /// Depth of the shallowest moved child permutation, or -1 for the identity.
  int first_label_depth() const {
    int best = -1;
    for (const auto& [w, p] : labels_)
      if (best < 0 || static_cast<int>(w.size()) < best) best = static_cast<int>(w.size());
    return best;
  }

  int support_depth() const {
    int best = -1;
    for (const auto& [w, p] : labels_) best = std::max(best, static_cast<int>(w.size()));
    return best;
  }

  bool labels_in(const PermGroup& d) const {
    for (const auto& [w, p] : labels_)
      if (!d.contains(p)) return false;
    return true;
  }

  friend bool operator==(const LabeledIsometry& a, const LabeledIsometry& b) {
    return a.q_ == b.q_ && a.labels_ == b.labels_;
  }

private:
  int q_ = 2;
  std::map<Word, Perm> labels_;
};

/// outer o inner (inner applied first).
inline LabeledIsometry compose(const LabeledIsometry& outer, const LabeledIsometry& inner) {
  std::set<Word> support;
  for (const auto& [w, p] : inner.labels()) support.insert(w);
  if (!outer.is_identity()) {
    LabeledIsometry inner_inv = inner.inverse();
    for (const auto& [w, p] : outer.labels()) support.insert(inner_inv.apply(w));
  }
  LabeledIsometry r(outer.q());
  for (const auto& w : support) r.set(w, outer.label(inner.apply(w)) * inner.label(w));
  return r;
}

}  // namespace neretin
