#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "neretin/error.hpp"

namespace neretin {

/// Permutation of {0..q-1} stored as its image list.
class Perm {
public:
  Perm() = default;

  explicit Perm(std::vector<std::uint8_t> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (auto v : images_) {
      if (v >= images_.size() || seen[v])
        throw InvalidArgument("not a bijection of {1.." + std::to_string(images_.size()) + "}");
      seen[v] = true;
    }
  }

  static Perm identity(int degree) {
    std::vector<std::uint8_t> im(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) im[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    return Perm(std::move(im));
  }

  /// Parses an image word such as "21" (1-based digits).
  static Perm parse(const std::string& word) {
    std::vector<std::uint8_t> im;
    im.reserve(word.size());
    for (char c : word) {
      if (c < '1' || c > '9') throw InvalidArgument("bad permutation digit in '" + word + "'");
      im.push_back(static_cast<std::uint8_t>(c - '1'));
    }
    if (im.empty()) throw InvalidArgument("empty permutation word");
    return Perm(std::move(im));
  }

  std::string str() const {
    std::string s;
    for (auto v : images_) s.push_back(static_cast<char>('1' + v));
    return s;
  }

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<std::uint8_t>& images() const { return images_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return false;
    return true;
  }

  /// (*this * other)(i) = this(other(i)).
  Perm operator*(const Perm& other) const {
    std::vector<std::uint8_t> im(images_.size());
    for (std::size_t i = 0; i < im.size(); ++i) im[i] = images_[other.images_[i]];
    return Perm(std::move(im), Unchecked{});
  }

  Perm inverse() const {
    std::vector<std::uint8_t> im(images_.size());
    for (std::size_t i = 0; i < im.size(); ++i) im[images_[i]] = static_cast<std::uint8_t>(i);
    return Perm(std::move(im), Unchecked{});
  }

  friend auto operator<=>(const Perm&, const Perm&) = default;
  friend bool operator==(const Perm&, const Perm&) = default;

private:
  struct Unchecked {};
  Perm(std::vector<std::uint8_t> images, Unchecked) : images_(std::move(images)) {}

  std::vector<std::uint8_t> images_;
};

/// A finite permutation group given by generators; all elements are
/// materialized at construction (q is small).
class PermGroup {
public:
  PermGroup() = default;

  PermGroup(int degree, const std::vector<Perm>& generators) : degree_(degree) {
    for (const auto& g : generators) {
      if (g.degree() != degree)
        throw InvalidArgument("generator " + g.str() + " has wrong degree");
      if (!g.is_identity()) generators_.push_back(g);
    }
    std::sort(generators_.begin(), generators_.end());
    generators_.erase(std::unique(generators_.begin(), generators_.end()), generators_.end());

    std::set<Perm> seen{Perm::identity(degree)};
    std::vector<Perm> frontier{Perm::identity(degree)};
    while (!frontier.empty()) {
      std::vector<Perm> next;
      for (const auto& p : frontier)
        for (const auto& g : generators_) {
          Perm h = g * p;
          if (seen.insert(h).second) next.push_back(h);
        }
      frontier = std::move(next);
    }
    elements_.assign(seen.begin(), seen.end());
  }

  static PermGroup symmetric(int degree) {
    std::vector<Perm> gens;
    if (degree >= 2) {
      std::vector<std::uint8_t> swap(static_cast<std::size_t>(degree)), cycle(static_cast<std::size_t>(degree));
      for (int i = 0; i < degree; ++i) {
        swap[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
        cycle[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((i + 1) % degree);
      }
      std::swap(swap[0], swap[1]);
      gens.emplace_back(swap);
      gens.emplace_back(cycle);
    }
    return PermGroup(degree, gens);
  }

  static PermGroup trivial(int degree) { return PermGroup(degree, {}); }

  int degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  /// Sorted, identity first.
  const std::vector<Perm>& elements() const { return elements_; }
  const std::vector<Perm>& generators() const { return generators_; }

  bool contains(const Perm& p) const {
    return std::binary_search(elements_.begin(), elements_.end(), p);
  }

  /// Minimal representative of the left coset p*D.
  Perm min_coset_rep(const Perm& p) const {
    Perm best = p * elements_.front();
    for (const auto& d : elements_) best = std::min(best, p * d);
    return best;
  }

  /// Minimal left coset representatives of Sym(q)/D, sorted.
  std::vector<Perm> left_coset_reps() const {
    std::vector<std::uint8_t> im(static_cast<std::size_t>(degree_));
    for (int i = 0; i < degree_; ++i) im[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    std::set<Perm> reps;
    do {
      reps.insert(min_coset_rep(Perm(im)));
    } while (std::next_permutation(im.begin(), im.end()));
    return {reps.begin(), reps.end()};
  }

  friend bool operator==(const PermGroup& a, const PermGroup& b) {
    return a.degree_ == b.degree_ && a.elements_ == b.elements_;
  }

private:
  int degree_ = 0;
  std::vector<Perm> generators_;
  std::vector<Perm> elements_;
};

/// Tree branching, number of boundary copies and the local group D <= Sym(q).
struct Config {
  int q = 2;
  int r = 1;
  PermGroup D;

  Config() : D(PermGroup::trivial(2)) {}

  Config(int q_, int r_, PermGroup d) : q(q_), r(r_), D(std::move(d)) {
    if (q < 2) throw InvalidArgument("q must be >= 2");
    if (q > 9) throw InvalidArgument("q > 9 is not supported by the digit-word encodings");
    if (r < 1) throw InvalidArgument("r must be >= 1");
    if (D.degree() != q) throw InvalidArgument("D must act on {1..q}");
  }

  static Config symmetric(int q, int r = 1) { return Config(q, r, PermGroup::symmetric(q)); }
  static Config trivial(int q, int r = 1) { return Config(q, r, PermGroup::trivial(q)); }

  friend bool operator==(const Config& a, const Config& b) {
    return a.q == b.q && a.r == b.r && a.D == b.D;
  }
};

/// Parses "sym", "triv" or comma-separated generator words ("21,12").
inline PermGroup parse_subgroup(int q, const std::string& spec) {
  if (spec == "sym") return PermGroup::symmetric(q);
  if (spec == "triv") return PermGroup::trivial(q);
  std::vector<Perm> gens;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    auto word = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    Perm p = Perm::parse(word);
    if (p.degree() != q) throw InvalidArgument("generator '" + word + "' is not a permutation of {1.." + std::to_string(q) + "}");
    gens.push_back(p);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return PermGroup(q, gens);
}

}  // namespace neretin
