#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "neretin/error.hpp"

namespace neretin {

/// Column-major sparse integer matrix; each column sorted by row.
struct SparseMatrix {
  using Entry = std::pair<std::size_t, std::int64_t>;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<Entry>> columns;

  SparseMatrix() = default;
  SparseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), columns(c) {}

  static SparseMatrix from_dense(const std::vector<std::vector<std::int64_t>>& m) {
    SparseMatrix s(m.size(), m.empty() ? 0 : m[0].size());
    for (std::size_t i = 0; i < s.rows; ++i)
      for (std::size_t j = 0; j < s.cols; ++j)
        if (m[i][j] != 0) s.columns[j].emplace_back(i, m[i][j]);
    return s;
  }

  std::vector<std::vector<std::int64_t>> dense() const {
    std::vector<std::vector<std::int64_t>> m(rows, std::vector<std::int64_t>(cols, 0));
    for (std::size_t j = 0; j < cols; ++j)
      for (const auto& [i, v] : columns[j]) m[i][j] = v;
    return m;
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns) n += c.size();
    return n;
  }
};

/// Returns the first nonzero entry (row, col) of a*b, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> product_witness(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<std::int64_t> acc(a.rows, 0);
  for (std::size_t j = 0; j < b.cols; ++j) {
    std::vector<std::size_t> touched;
    for (const auto& [k, v] : b.columns[j])
      for (const auto& [i, w] : a.columns[k]) {
        if (acc[i] == 0) touched.push_back(i);
        acc[i] += v * w;
      }
    std::optional<std::pair<std::size_t, std::size_t>> bad;
    for (auto i : touched) {
      if (acc[i] != 0 && !bad) bad = std::make_pair(i, j);
      acc[i] = 0;
    }
    if (bad) return bad;
  }
  return std::nullopt;
}

using Simplex = std::vector<std::uint32_t>;

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : s) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Finite free chain complex C_0 <- C_1 <- ... <- C_top. boundary(d) maps
/// C_d to C_{d-1} for d >= 1. When built from simplices the basis is kept.
class ChainComplex {
public:
  ChainComplex() = default;

  /// From explicit boundary matrices; boundaries[d-1] is the map C_d -> C_{d-1}.
  ChainComplex(std::vector<std::size_t> sizes, std::vector<SparseMatrix> boundaries)
      : sizes_(std::move(sizes)), boundaries_(std::move(boundaries)) {
    if (!sizes_.empty() && boundaries_.size() + 1 != sizes_.size())
      throw InvalidArgument("need one boundary matrix per positive dimension");
    for (std::size_t d = 0; d < boundaries_.size(); ++d)
      if (boundaries_[d].cols != sizes_[d + 1] || boundaries_[d].rows != sizes_[d])
        throw InvalidArgument("boundary matrix " + std::to_string(d + 1) + " has the wrong shape");
  }

  /// Simplicial chain complex; `simplices[d]` lists the d-simplices as sorted
  /// vertex lists and must be closed under taking faces up to the top degree.
  static ChainComplex from_simplices(std::vector<std::vector<Simplex>> simplices) {
    while (!simplices.empty() && simplices.back().empty()) simplices.pop_back();
    ChainComplex c;
    for (auto& level : simplices) std::sort(level.begin(), level.end());
    for (const auto& level : simplices) c.sizes_.push_back(level.size());
    for (std::size_t d = 1; d < simplices.size(); ++d) {
      std::unordered_map<Simplex, std::size_t, SimplexHash> index;
      index.reserve(simplices[d - 1].size());
      for (std::size_t i = 0; i < simplices[d - 1].size(); ++i) index.emplace(simplices[d - 1][i], i);
      SparseMatrix m(simplices[d - 1].size(), simplices[d].size());
      Simplex face(d);
      for (std::size_t j = 0; j < simplices[d].size(); ++j) {
        const auto& s = simplices[d][j];
        for (std::size_t i = 0; i <= d; ++i) {
          std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(i), face.begin());
          std::copy(s.begin() + static_cast<std::ptrdiff_t>(i) + 1, s.end(), face.begin() + static_cast<std::ptrdiff_t>(i));
          auto it = index.find(face);
          if (it == index.end()) throw InvalidArgument("simplex list is not closed under faces");
          m.columns[j].emplace_back(it->second, (i % 2 == 0) ? 1 : -1);
        }
        std::sort(m.columns[j].begin(), m.columns[j].end());
      }
      c.boundaries_.push_back(std::move(m));
    }
    c.basis_ = std::move(simplices);
    return c;
  }

  int top_dimension() const { return static_cast<int>(sizes_.size()) - 1; }
  std::size_t size(int d) const {
    return d >= 0 && d < static_cast<int>(sizes_.size()) ? sizes_[static_cast<std::size_t>(d)] : 0;
  }
  /// Boundary C_d -> C_{d-1}; an empty matrix outside the stored range.
  SparseMatrix boundary(int d) const {
    if (d >= 1 && d <= top_dimension()) return boundaries_[static_cast<std::size_t>(d - 1)];
    return SparseMatrix(size(d - 1), size(d));
  }
  const SparseMatrix& boundary_ref(int d) const { return boundaries_.at(static_cast<std::size_t>(d - 1)); }
  bool has_basis() const { return !basis_.empty() || sizes_.empty(); }
  const std::vector<Simplex>& simplices(int d) const { return basis_.at(static_cast<std::size_t>(d)); }

  /// Drops everything above dimension `top`.
  ChainComplex truncated(int top) const {
    if (top >= top_dimension()) return *this;
    ChainComplex c;
    for (int d = 0; d <= top; ++d) c.sizes_.push_back(sizes_[static_cast<std::size_t>(d)]);
    for (int d = 1; d <= top; ++d) c.boundaries_.push_back(boundaries_[static_cast<std::size_t>(d - 1)]);
    if (!basis_.empty())
      for (int d = 0; d <= top; ++d) c.basis_.push_back(basis_[static_cast<std::size_t>(d)]);
    return c;
  }

  long long euler_characteristic() const {
    long long chi = 0;
    for (int d = 0; d <= top_dimension(); ++d)
      chi += (d % 2 == 0 ? 1 : -1) * static_cast<long long>(size(d));
    return chi;
  }

  /// Throws CheckFailed naming a nonzero entry of some boundary composite.
  void check_boundary_squared() const {
    for (int d = 2; d <= top_dimension(); ++d)
      if (auto w = product_witness(boundary_ref(d - 1), boundary_ref(d)))
        throw CheckFailed("boundary squared is nonzero: d=" + std::to_string(d) + " row " + std::to_string(w->first) +
                          " column " + std::to_string(w->second));
  }

private:
  std::vector<std::size_t> sizes_;
  std::vector<SparseMatrix> boundaries_;
  std::vector<std::vector<Simplex>> basis_;
};

/// Simple undirected graph on vertices 0..n-1.
struct Graph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// All cliques of at most max_dim+1 vertices, in lexicographic order per dimension.
inline std::vector<std::vector<Simplex>> cliques(const Graph& g, int max_dim) {
  const std::size_t n = g.vertices;
  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> adj(n, std::vector<std::uint64_t>(words, 0));
  for (auto [a, b] : g.edges) {
    if (a >= n || b >= n) throw InvalidArgument("edge endpoint out of range");
    if (a == b) throw InvalidArgument("graph has a loop");
    adj[a][b / 64] |= 1ull << (b % 64);
    adj[b][a / 64] |= 1ull << (a % 64);
  }
  std::vector<std::vector<Simplex>> out(static_cast<std::size_t>(std::max(max_dim, 0)) + 1);
  if (max_dim < 0) return {};
  Simplex current;
  // candidates: common neighbours greater than the last vertex
  auto rec = [&](auto&& self, const std::vector<std::uint64_t>& cand) -> void {
    out[current.size() - 1].push_back(current);
    if (static_cast<int>(current.size()) > max_dim) return;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bits = cand[w];
      while (bits) {
        auto v = static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
        bits &= bits - 1;
        std::vector<std::uint64_t> next(words);
        for (std::size_t x = 0; x < words; ++x) next[x] = cand[x] & adj[v][x];
        // keep only vertices above v
        for (std::size_t x = 0; x <= v / 64 && x < words; ++x) {
          if (x < v / 64)
            next[x] = 0;
          else
            next[x] &= (v % 64 == 63) ? 0 : (~0ull << (v % 64 + 1));
        }
        current.push_back(v);
        self(self, next);
        current.pop_back();
      }
    }
  };
  for (std::uint32_t v = 0; v < n; ++v) {
    std::vector<std::uint64_t> cand = adj[v];
    for (std::size_t x = 0; x <= v / 64 && x < words; ++x) {
      if (x < v / 64)
        cand[x] = 0;
      else
        cand[x] &= (v % 64 == 63) ? 0 : (~0ull << (v % 64 + 1));
    }
    current = {v};
    rec(rec, cand);
  }
  return out;
}

/// Clique complex of a simple graph, truncated at max_dim.
inline ChainComplex flag_complex(const Graph& g, int max_dim) { return ChainComplex::from_simplices(cliques(g, max_dim)); }

}  // namespace neretin
