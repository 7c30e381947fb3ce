#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "neretin/error.hpp"

namespace neretin {

/// Path from a summand root; digits in {0..q-1}.
using Word = std::vector<std::uint8_t>;

inline bool is_prefix(const Word& prefix, const Word& w) {
  return prefix.size() <= w.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

inline Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

inline std::string word_str(const Word& w) {
  std::string s;
  for (auto d : w) s.push_back(static_cast<char>('0' + d));
  return s;
}

inline Word parse_word(const std::string& s, int q) {
  Word w;
  for (char c : s) {
    int d = c - '0';
    if (d < 0 || d >= q) throw InvalidArgument("digit '" + std::string(1, c) + "' out of range for q=" + std::to_string(q));
    w.push_back(static_cast<std::uint8_t>(d));
  }
  return w;
}

/// A vertex of one of the copies of the rooted q-ary tree; equivalently a
/// ball in the boundary. Summands are 1-based.
struct Address {
  int summand = 1;
  Word word;

  int depth() const { return static_cast<int>(word.size()); }

  Address child(int digit) const {
    Address a = *this;
    a.word.push_back(static_cast<std::uint8_t>(digit));
    return a;
  }

  Address parent() const {
    Address a = *this;
    a.word.pop_back();
    return a;
  }

  bool is_prefix_of(const Address& other) const {
    return summand == other.summand && is_prefix(word, other.word);
  }

  std::string str() const { return std::to_string(summand) + ":" + word_str(word); }

  static Address parse(const std::string& s, int q) {
    auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0) throw InvalidArgument("address '" + s + "' is not of the form s:word");
    Address a;
    try {
      a.summand = std::stoi(s.substr(0, colon));
    } catch (const std::exception&) {
      throw InvalidArgument("bad summand in address '" + s + "'");
    }
    if (a.summand < 1) throw InvalidArgument("summand must be >= 1 in '" + s + "'");
    a.word = parse_word(s.substr(colon + 1), q);
    return a;
  }

  friend auto operator<=>(const Address&, const Address&) = default;
  friend bool operator==(const Address&, const Address&) = default;
};

/// Sentinel for the common prefix length of points in different summands
/// (visual distance infinity).
inline constexpr int kDifferentSummands = std::numeric_limits<int>::max();

/// Length of the common initial segment of two addresses.
inline int common_prefix_length(const Address& x, const Address& y) {
  if (x.summand != y.summand) return kDifferentSummands;
  auto [ix, iy] = std::mismatch(x.word.begin(), x.word.end(), y.word.begin(), y.word.end());
  return static_cast<int>(ix - x.word.begin());
}

/// exp(-common prefix length); infinity across summands.
inline double visual_distance(const Address& x, const Address& y) {
  int c = common_prefix_length(x, y);
  if (c == kDifferentSummands) return std::numeric_limits<double>::infinity();
  return std::exp(-static_cast<double>(c));
}

/// A partition of nB into balls: a complete prefix code over n summands,
/// kept sorted.
class LeafPartition {
public:
  LeafPartition() = default;

  LeafPartition(int q, int summands, std::vector<Address> leaves)
      : q_(q), summands_(summands), leaves_(std::move(leaves)) {
    std::sort(leaves_.begin(), leaves_.end());
    validate();
  }

  /// The partition into summand roots.
  static LeafPartition roots(int q, int summands) {
    std::vector<Address> leaves;
    for (int s = 1; s <= summands; ++s) leaves.push_back(Address{s, {}});
    return LeafPartition(q, summands, std::move(leaves));
  }

  int q() const { return q_; }
  int summands() const { return summands_; }
  const std::vector<Address>& leaves() const { return leaves_; }
  std::size_t size() const { return leaves_.size(); }

  int max_depth() const {
    int d = 0;
    for (const auto& l : leaves_) d = std::max(d, l.depth());
    return d;
  }

  /// Index of the leaf that is a prefix of x, or npos if x lies above the leaves.
  std::size_t locate(const Address& x) const {
    auto it = std::upper_bound(leaves_.begin(), leaves_.end(), x);
    if (it == leaves_.begin()) return npos;
    --it;
    return it->is_prefix_of(x) ? static_cast<std::size_t>(it - leaves_.begin()) : npos;
  }

  std::size_t index_of(const Address& a) const {
    auto it = std::lower_bound(leaves_.begin(), leaves_.end(), a);
    return (it != leaves_.end() && *it == a) ? static_cast<std::size_t>(it - leaves_.begin()) : npos;
  }

  bool contains(const Address& a) const { return index_of(a) != npos; }

  friend bool operator==(const LeafPartition& a, const LeafPartition& b) {
    return a.q_ == b.q_ && a.summands_ == b.summands_ && a.leaves_ == b.leaves_;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  void validate() const {
    if (q_ < 2) throw InvalidArgument("partition needs q >= 2");
    if (summands_ < 1) throw InvalidArgument("partition needs at least one summand");
    for (const auto& l : leaves_) {
      if (l.summand < 1 || l.summand > summands_)
        throw InvalidArgument("leaf " + l.str() + " outside summand range 1.." + std::to_string(summands_));
      for (auto d : l.word)
        if (d >= q_) throw InvalidArgument("leaf " + l.str() + " has digit out of range");
    }
    std::size_t pos = 0;
    for (int s = 1; s <= summands_; ++s) {
      Address root{s, {}};
      if (!complete_below(root, pos))
        throw InvalidArgument("leaves do not form a complete prefix code in summand " + std::to_string(s));
    }
    if (pos != leaves_.size()) throw InvalidArgument("leaves do not form a complete prefix code");
  }

  // Consumes the leaves below `node` starting at `pos` (sorted order makes them contiguous).
  bool complete_below(const Address& node, std::size_t& pos) const {
    if (pos >= leaves_.size() || !node.is_prefix_of(leaves_[pos])) return false;
    if (leaves_[pos] == node) {
      ++pos;
      return true;
    }
    for (int d = 0; d < q_; ++d)
      if (!complete_below(node.child(d), pos)) return false;
    return true;
  }

  int q_ = 2;
  int summands_ = 1;
  std::vector<Address> leaves_;
};

/// Coarsest partition refining both inputs.
inline LeafPartition common_refinement(const LeafPartition& p1, const LeafPartition& p2) {
  if (p1.summands() != p2.summands() || p1.q() != p2.q())
    throw InvalidArgument("common_refinement: partitions live over different spaces");
  std::set<Address> out;
  auto keep_deeper = [&](const LeafPartition& a, const LeafPartition& b) {
    for (const auto& l : a.leaves())
      if (b.locate(l) != LeafPartition::npos) out.insert(l);
  };
  keep_deeper(p1, p2);
  keep_deeper(p2, p1);
  return LeafPartition(p1.q(), p1.summands(), {out.begin(), out.end()});
}

}  // namespace neretin
