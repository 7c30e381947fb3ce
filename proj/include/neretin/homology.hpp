#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "neretin/chain_complex.hpp"
#include "neretin/smith.hpp"

namespace neretin {

struct DegreeHomology {
  int dim = 0;
  std::size_t betti = 0;
  std::vector<BigInt> torsion;  // invariant factors > 1

  bool vanishes() const { return betti == 0 && torsion.empty(); }
};

/// Reduced integral homology in degrees 0..through, from the augmented
/// complex. `empty` records the reduced class in degree -1.
struct HomologyResult {
  std::vector<DegreeHomology> degrees;
  bool empty = false;
  std::vector<std::size_t> ranks;  // rank of the augmentation and of d_1..d_{through+1}

  const DegreeHomology& at(int d) const { return degrees.at(static_cast<std::size_t>(d)); }
  bool vanishes_through(int k) const {
    if (k >= 0 && empty) return false;
    for (int d = 0; d <= k && d < static_cast<int>(degrees.size()); ++d)
      if (!at(d).vanishes()) return false;
    return true;
  }
};

enum class Backend { Auto, Dense, Sparse };

namespace detail {

/// Homology of an augmented complex given as dense boundary matrices
/// bd[d+1] : dim d -> dim d-1 for d = -1.. (bd[0] unused). sizes[d+1] cells.
inline HomologyResult homology_from_factors(const std::vector<std::size_t>& sizes,
                                            const std::vector<std::vector<BigInt>>& factors, int through) {
  // factors[d+1] are the invariant factors of the boundary out of dimension d
  HomologyResult r;
  auto rank = [&](int d) -> std::size_t {
    auto i = static_cast<std::size_t>(d + 1);
    return i < factors.size() ? factors[i].size() : 0;
  };
  auto size = [&](int d) -> std::size_t {
    auto i = static_cast<std::size_t>(d + 1);
    return i < sizes.size() ? sizes[i] : 0;
  };
  r.empty = size(-1) - rank(0) > 0;
  for (int d = 0; d <= through + 1; ++d) r.ranks.push_back(rank(d));
  for (int d = 0; d <= through; ++d) {
    DegreeHomology h;
    h.dim = d;
    h.betti = size(d) - rank(d) - rank(d + 1);
    auto i = static_cast<std::size_t>(d + 2);
    if (i < factors.size())
      for (const auto& f : factors[i])
        if (f > 1) h.torsion.push_back(f);
    r.degrees.push_back(std::move(h));
  }
  return r;
}

inline HomologyResult dense_homology(const ChainComplex& c, int through) {
  const int top = std::min(c.top_dimension(), through + 1);
  // augmentation: every vertex maps to the single (-1)-cell
  std::vector<std::size_t> sizes{1};
  std::vector<std::vector<BigInt>> factors{{}};
  for (int d = 0; d <= top; ++d) sizes.push_back(c.size(d));
  if (c.size(0) > 0)
    factors.push_back({BigInt(1)});
  else
    factors.push_back({});
  for (int d = 1; d <= top; ++d) {
    const auto& m = c.boundary_ref(d);
    if (m.nonzeros() == 0) {
      factors.emplace_back();
      continue;
    }
    factors.push_back(invariant_factors(m.dense(), m.rows, m.cols));
  }
  return homology_from_factors(sizes, factors, through);
}

/// Algebraic reduction of an augmented chain complex: repeatedly cancels a
/// cell a against a face b with unit coefficient, rewriting the boundaries of
/// the other cofaces of b. Fill-free cancellations (b has one coface, or a
/// has one face) go first; general unit pivots are taken by least fill.
template <class T>
class Reducer {
public:
  struct Cell {
    int dim = 0;
    bool alive = true;
    std::vector<std::pair<std::uint32_t, T>> bd;
    std::vector<std::uint32_t> cob;
  };

  Reducer(const ChainComplex& c, int top) {
    std::size_t total = 1;
    for (int d = 0; d <= top; ++d) total += c.size(d);
    cells_.reserve(total);
    offset_.push_back(0);
    cells_.push_back(Cell{-1, true, {}, {}});
    for (int d = 0; d <= top; ++d) {
      offset_.push_back(static_cast<std::uint32_t>(cells_.size()));
      for (std::size_t j = 0; j < c.size(d); ++j) {
        Cell cell;
        cell.dim = d;
        if (d == 0) {
          cell.bd.emplace_back(0, T(1));
        } else {
          for (const auto& [i, v] : c.boundary_ref(d).columns[j])
            cell.bd.emplace_back(offset_[static_cast<std::size_t>(d)] + static_cast<std::uint32_t>(i), T(v));
        }
        cells_.push_back(std::move(cell));
      }
    }
    for (std::uint32_t id = 0; id < cells_.size(); ++id)
      for (const auto& [f, v] : cells_[id].bd) cells_[f].cob.push_back(id);
  }

  void run() {
    std::deque<std::uint32_t> queue;
    std::vector<char> queued(cells_.size(), 1);
    for (std::uint32_t id = 0; id < cells_.size(); ++id) queue.push_back(id);
    auto push = [&](std::uint32_t id) {
      if (!queued[id] && cells_[id].alive) {
        queued[id] = 1;
        queue.push_back(id);
      }
    };
    auto drain = [&] {
      while (!queue.empty()) {
        auto id = queue.front();
        queue.pop_front();
        queued[id] = 0;
        if (!cells_[id].alive) continue;
        auto& cell = cells_[id];
        if (cell.bd.size() == 1 && is_unit(cell.bd[0].second)) {
          eliminate(id, cell.bd[0].first, push);
          continue;
        }
        compact(id);
        if (cells_[id].cob.size() == 1) {
          auto a = cells_[id].cob[0];
          if (is_unit(coef(a, id))) eliminate(a, id, push);
        }
      }
    };
    for (;;) {
      drain();
      // general unit pivots, cheapest fill first; one scan serves a batch
      std::vector<std::tuple<std::size_t, std::uint32_t, std::uint32_t>> candidates;
      std::vector<char> compacted(cells_.size(), 0);
      for (std::uint32_t a = 0; a < cells_.size(); ++a) {
        if (!cells_[a].alive) continue;
        for (const auto& [b, v] : cells_[a].bd) {
          if (!is_unit(v)) continue;
          if (!compacted[b]) {
            compact(b);
            compacted[b] = 1;
          }
          candidates.emplace_back(fill(a, b), a, b);
        }
      }
      if (candidates.empty()) break;
      std::sort(candidates.begin(), candidates.end());
      const std::size_t limit = 2 * std::get<0>(candidates.front()) + 8;
      for (const auto& [cost, a, b] : candidates) {
        if (cost > limit) break;
        if (!cells_[a].alive || !cells_[b].alive || !is_unit(coef(a, b))) continue;
        compact(b);
        if (fill(a, b) > limit) continue;
        eliminate(a, b, push);
        drain();
      }
    }
  }

  /// Surviving cells per dimension (index 0 is dimension -1).
  std::vector<std::vector<std::uint32_t>> survivors() const {
    std::vector<std::vector<std::uint32_t>> out(offset_.size());
    for (std::uint32_t id = 0; id < cells_.size(); ++id)
      if (cells_[id].alive) out[static_cast<std::size_t>(cells_[id].dim + 1)].push_back(id);
    return out;
  }

  const Cell& cell(std::uint32_t id) const { return cells_[id]; }

private:
  static bool is_unit(const T& v) { return v == 1 || v == -1; }

  std::size_t fill(std::uint32_t a, std::uint32_t b) const {
    return (cells_[b].cob.size() - 1) * (cells_[a].bd.size() - 1);
  }

  T coef(std::uint32_t cell, std::uint32_t face) const {
    for (const auto& [f, v] : cells_[cell].bd)
      if (f == face) return v;
    return T(0);
  }

  // drop stale and duplicate coface entries
  void compact(std::uint32_t id) {
    auto& cob = cells_[id].cob;
    std::sort(cob.begin(), cob.end());
    cob.erase(std::unique(cob.begin(), cob.end()), cob.end());
    cob.erase(std::remove_if(cob.begin(), cob.end(),
                             [&](std::uint32_t x) { return !cells_[x].alive || coef(x, id) == 0; }),
              cob.end());
  }

  template <class Push>
  void eliminate(std::uint32_t a, std::uint32_t b, Push&& push) {
    const T ab = coef(a, b);  // a unit, its own inverse
    compact(b);
    auto xs = cells_[b].cob;
    auto a_bd = cells_[a].bd;
    cells_[a].alive = false;
    cells_[b].alive = false;
    for (auto x : xs) {
      if (x == a) continue;
      auto& bd = cells_[x].bd;
      T xb = coef(x, b);
      T f = arith::mul(xb, ab);
      for (const auto& [face, v] : a_bd) {
        T delta = arith::mul(f, v);
        auto it = std::find_if(bd.begin(), bd.end(), [&](const auto& e) { return e.first == face; });
        if (it == bd.end()) {
          bd.emplace_back(face, arith::neg(delta));
          cells_[face].cob.push_back(x);
        } else {
          it->second = arith::sub(it->second, delta);
        }
      }
      bd.erase(std::remove_if(bd.begin(), bd.end(), [](const auto& e) { return e.second == 0; }), bd.end());
      push(x);
    }
    for (auto y : cells_[a].cob) {
      if (!cells_[y].alive) continue;
      auto& bd = cells_[y].bd;
      bd.erase(std::remove_if(bd.begin(), bd.end(), [&](const auto& e) { return e.first == a; }), bd.end());
      push(y);
    }
    for (const auto& [face, v] : a_bd)
      if (face != b) push(face);
  }

  std::vector<Cell> cells_;
  std::vector<std::uint32_t> offset_;
};

template <class T>
HomologyResult sparse_homology_with(const ChainComplex& c, int through) {
  const int top = std::min(c.top_dimension(), through + 1);
  Reducer<T> red(c, top);
  red.run();
  auto alive = red.survivors();
  std::vector<std::size_t> sizes;
  for (const auto& level : alive) sizes.push_back(level.size());
  std::vector<std::vector<BigInt>> factors{{}};
  for (std::size_t level = 1; level < alive.size(); ++level) {
    const auto& cols = alive[level];
    const auto& rows = alive[level - 1];
    std::map<std::uint32_t, std::size_t> row_index;
    for (std::size_t i = 0; i < rows.size(); ++i) row_index[rows[i]] = i;
    DenseMatrix<BigInt> m(rows.size(), std::vector<BigInt>(cols.size()));
    bool nonzero = false;
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (const auto& [f, v] : red.cell(cols[j]).bd) {
        m[row_index.at(f)][j] = BigInt(v);
        nonzero = true;
      }
    if (!nonzero) {
      factors.emplace_back();
      continue;
    }
    factors.push_back(smith_dense<BigInt>(std::move(m), rows.size(), cols.size(), false).factors);
  }
  return homology_from_factors(sizes, factors, through);
}

inline HomologyResult sparse_homology(const ChainComplex& c, int through) {
  try {
    return sparse_homology_with<std::int64_t>(c, through);
  } catch (const Overflow&) {
    return sparse_homology_with<BigInt>(c, through);
  }
}

}  // namespace detail

/// Reduced integral homology in degrees 0..through. Uses cells up to
/// dimension through+1.
inline HomologyResult reduced_homology(const ChainComplex& c, int through, Backend backend = Backend::Auto) {
  if (through < 0) throw InvalidArgument("reduced_homology: through must be >= 0");
  c.truncated(through + 1).check_boundary_squared();
  if (backend == Backend::Auto) {
    backend = Backend::Dense;
    for (int d = 1; d <= std::min(c.top_dimension(), through + 1); ++d)
      if (c.size(d) > 5000 || c.size(d - 1) * c.size(d) > 1'000'000) backend = Backend::Sparse;
  }
  return backend == Backend::Dense ? detail::dense_homology(c, through) : detail::sparse_homology(c, through);
}

struct AcyclicityCertificate {
  bool acyclic = false;
  HomologyResult homology;
};

/// Whether reduced homology vanishes in degrees 0..k (k = -1 asks only for
/// nonemptiness).
inline AcyclicityCertificate is_k_acyclic(const ChainComplex& c, int k, Backend backend = Backend::Auto) {
  AcyclicityCertificate cert;
  cert.homology = reduced_homology(c, std::max(k, 0), backend);
  cert.acyclic = !cert.homology.empty && (k < 0 || cert.homology.vanishes_through(k));
  return cert;
}

// ---------------------------------------------------------------------------
// Fundamental group

enum class Pi1Verdict { Trivial, Nontrivial, Unknown };

inline std::string to_string(Pi1Verdict v) {
  switch (v) {
    case Pi1Verdict::Trivial: return "trivial";
    case Pi1Verdict::Nontrivial: return "nontrivial";
    case Pi1Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

struct Pi1Report {
  Pi1Verdict verdict = Pi1Verdict::Unknown;
  DegreeHomology h1;               // abelianization witness
  std::size_t generators_left = 0;  // after simplification
  std::size_t relators_left = 0;
  std::size_t work = 0;
};

namespace detail {

using Letter = int;  // +-(generator + 1)
using GroupWord = std::vector<Letter>;

inline void free_reduce(GroupWord& w) {
  GroupWord out;
  for (auto l : w) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  // cyclic reduction
  std::size_t i = 0, j = out.size();
  while (j - i >= 2 && out[i] == -out[j - 1]) {
    ++i;
    --j;
  }
  w.assign(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(j));
}

/// Signed union-find: each generator is trivial, a root, or equal to
/// (parent)^sign.
class GeneratorClasses {
public:
  explicit GeneratorClasses(std::size_t n) : parent_(n), sign_(n, 1), trivial_(n, false) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  // returns the letter for generator g in terms of roots, 0 if trivial
  Letter resolve(std::size_t g) {
    int s = 1;
    std::size_t x = g;
    while (parent_[x] != x) {
      s *= sign_[x];
      x = parent_[x];
    }
    parent_[g] = x;
    sign_[g] = (g == x) ? 1 : s;
    if (trivial_[x]) return 0;
    return s * static_cast<Letter>(x + 1);
  }

  void make_trivial(std::size_t root) { trivial_[root] = true; }

  // root a := (root b)^s
  void merge(std::size_t a, std::size_t b, int s) {
    parent_[a] = b;
    sign_[a] = s;
  }

  std::size_t count_roots() {
    std::size_t n = 0;
    for (std::size_t g = 0; g < parent_.size(); ++g)
      if (parent_[g] == g && !trivial_[g]) ++n;
    return n;
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<int> sign_;
  std::vector<bool> trivial_;
};

inline GroupWord rewrite(const GroupWord& w, GeneratorClasses& classes) {
  GroupWord out;
  out.reserve(w.size());
  for (auto l : w) {
    Letter r = classes.resolve(static_cast<std::size_t>(std::abs(l) - 1));
    if (r != 0) out.push_back(l > 0 ? r : -r);
  }
  free_reduce(out);
  return out;
}

}  // namespace detail

/// Edge-path presentation from a spanning tree and the triangles, simplified
/// within `budget` letter operations. "trivial" only when no generator is
/// left; "nontrivial" only when H_1 is nonzero.
inline Pi1Report pi1_report(const ChainComplex& c, std::size_t budget) {
  if (!c.has_basis()) throw InvalidArgument("pi1_report needs a simplicial complex");
  const std::size_t n = c.size(0);
  if (n == 0) throw InvalidArgument("pi1_report: complex is empty");
  // spanning tree by BFS over edges
  std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> adj(n);
  const std::vector<Simplex> no_simplices;
  const auto& edges = c.top_dimension() >= 1 ? c.simplices(1) : no_simplices;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e][0]].emplace_back(edges[e][1], e);
    adj[edges[e][1]].emplace_back(edges[e][0], e);
  }
  std::vector<bool> seen(n, false), tree(edges.size(), false);
  std::deque<std::uint32_t> bfs{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!bfs.empty()) {
    auto v = bfs.front();
    bfs.pop_front();
    for (auto [w, e] : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        tree[e] = true;
        ++reached;
        bfs.push_back(w);
      }
  }
  if (reached != n) throw InvalidArgument("pi1_report: complex is disconnected");

  std::vector<std::size_t> gen_of(edges.size(), SIZE_MAX);
  std::size_t gens = 0;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (!tree[e]) gen_of[e] = gens++;
  std::unordered_map<Simplex, std::size_t, SimplexHash> edge_index;
  for (std::size_t e = 0; e < edges.size(); ++e) edge_index.emplace(edges[e], e);

  std::vector<detail::GroupWord> relators;
  if (c.top_dimension() >= 2)
    for (const auto& t : c.simplices(2)) {
      // boundary path a -> b -> c -> a
      detail::GroupWord w;
      auto letter = [&](std::uint32_t x, std::uint32_t y, int s) {
        auto g = gen_of[edge_index.at(Simplex{x, y})];
        if (g != SIZE_MAX) w.push_back(s * static_cast<int>(g + 1));
      };
      letter(t[0], t[1], 1);
      letter(t[1], t[2], 1);
      letter(t[0], t[2], -1);
      if (!w.empty()) relators.push_back(std::move(w));
    }

  Pi1Report rep;
  detail::GeneratorClasses classes(gens);
  // short relators: x = 1 and x = y^+-1, iterated to a fixpoint
  bool changed = true;
  while (changed && rep.work < budget) {
    changed = false;
    std::vector<detail::GroupWord> kept;
    for (auto& r : relators) {
      auto w = detail::rewrite(r, classes);
      rep.work += r.size();
      if (w.empty()) continue;
      if (w.size() == 1) {
        classes.make_trivial(static_cast<std::size_t>(std::abs(w[0]) - 1));
        changed = true;
        continue;
      }
      if (w.size() == 2 && std::abs(w[0]) != std::abs(w[1])) {
        // x^s y^t = 1  =>  x = y^(-t*s)
        auto x = static_cast<std::size_t>(std::abs(w[0]) - 1);
        auto y = static_cast<std::size_t>(std::abs(w[1]) - 1);
        int s = w[0] > 0 ? 1 : -1, t = w[1] > 0 ? 1 : -1;
        classes.merge(x, y, -t * s);
        changed = true;
        continue;
      }
      kept.push_back(std::move(w));
    }
    relators = std::move(kept);
  }
  for (auto& r : relators) r = detail::rewrite(r, classes);
  relators.erase(std::remove_if(relators.begin(), relators.end(), [](const auto& r) { return r.empty(); }),
                 relators.end());

  // general Tietze moves: eliminate a generator occurring once in a relator
  std::map<detail::Letter, detail::GroupWord> substitution;  // root generator -> word in other roots
  auto expand = [&](const detail::GroupWord& w) {
    detail::GroupWord out;
    for (auto l : w) {
      auto it = substitution.find(std::abs(l));
      if (it == substitution.end()) {
        out.push_back(l);
      } else if (l > 0) {
        out.insert(out.end(), it->second.begin(), it->second.end());
      } else {
        for (auto k = it->second.rbegin(); k != it->second.rend(); ++k) out.push_back(-*k);
      }
    }
    detail::free_reduce(out);
    return out;
  };
  std::size_t remaining = classes.count_roots();
  bool progress = true;
  while (progress && remaining > 0 && rep.work < budget) {
    progress = false;
    std::sort(relators.begin(), relators.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (std::size_t i = 0; i < relators.size() && rep.work < budget; ++i) {
      auto w = expand(relators[i]);
      rep.work += w.size();
      if (w.empty()) continue;
      std::map<detail::Letter, int> count;
      for (auto l : w) ++count[std::abs(l)];
      detail::Letter pick = 0;
      for (auto [g, k] : count)
        if (k == 1) {
          pick = g;
          break;
        }
      if (pick == 0) continue;
      // rotate so that the picked letter is first: x^s * rest = 1 => x = rest^(-s)
      auto pos = static_cast<std::size_t>(
          std::find_if(w.begin(), w.end(), [&](detail::Letter l) { return std::abs(l) == pick; }) - w.begin());
      std::rotate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos), w.end());
      int s = w[0] > 0 ? 1 : -1;
      detail::GroupWord rest(w.begin() + 1, w.end());
      detail::GroupWord value;
      if (s > 0) {
        for (auto k = rest.rbegin(); k != rest.rend(); ++k) value.push_back(-*k);
      } else {
        value = rest;
      }
      for (auto& [g, sub] : substitution) {
        // keep substitutions expressed in live generators
        detail::GroupWord updated;
        for (auto l : sub) {
          if (std::abs(l) != pick) {
            updated.push_back(l);
          } else if (l > 0) {
            updated.insert(updated.end(), value.begin(), value.end());
          } else {
            for (auto k = value.rbegin(); k != value.rend(); ++k) updated.push_back(-*k);
          }
        }
        detail::free_reduce(updated);
        rep.work += updated.size();
        sub = std::move(updated);
      }
      substitution[pick] = value;
      relators.erase(relators.begin() + static_cast<std::ptrdiff_t>(i));
      --remaining;
      progress = true;
      break;
    }
  }

  rep.generators_left = remaining;
  rep.relators_left = relators.size();
  auto h = reduced_homology(c, 1);
  rep.h1 = h.at(1);
  if (remaining == 0)
    rep.verdict = Pi1Verdict::Trivial;
  else if (!rep.h1.vanishes())
    rep.verdict = Pi1Verdict::Nontrivial;
  else
    rep.verdict = Pi1Verdict::Unknown;
  if (rep.verdict == Pi1Verdict::Trivial && !rep.h1.vanishes())
    throw CheckFailed("pi1_report: presentation collapsed but H_1 is nonzero");
  return rep;
}

// ---------------------------------------------------------------------------
// Output

inline std::string torsion_string(const DegreeHomology& h) {
  std::string s;
  for (std::size_t i = 0; i < h.torsion.size(); ++i) {
    if (i) s += ";";
    s += h.torsion[i].str();
  }
  return s;
}

/// Betti table rows: instance,dim,betti,torsion (torsion factors joined by ';').
inline void write_betti_csv(std::ostream& out, const std::string& instance, const HomologyResult& h,
                            bool header = true) {
  if (header) out << "instance,dim,betti,torsion\n";
  if (h.empty) out << instance << ",-1,1,\n";
  for (const auto& d : h.degrees) out << instance << "," << d.dim << "," << d.betti << "," << torsion_string(d) << "\n";
}

/// Each boundary matrix as "# boundary d rows cols" followed by its rows.
inline void write_matrices(std::ostream& out, const ChainComplex& c) {
  for (int d = 1; d <= c.top_dimension(); ++d) {
    const auto& m = c.boundary_ref(d);
    out << "# boundary " << d << " " << m.rows << " " << m.cols << "\n";
    auto dense = m.dense();
    for (const auto& row : dense) {
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
      out << "\n";
    }
  }
}

}  // namespace neretin
