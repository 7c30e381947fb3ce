// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "neretin/neretin.hpp"
#include "oracles.hpp"
#include "trading_oracles.hpp"

using namespace neretin;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

Result fail(const std::string& why) { return {false, why}; }

std::string config_name(const Config& c) {
  std::ostringstream s;
  s << "q=" << c.q << " r=" << c.r << " |D|=" << c.D.order();
  return s.str();
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// --- 1, 2: connectivity grid ------------------------------------------------

Result nu_grid(const std::vector<Config>& configs, int nmax, double seconds) {
  auto t0 = std::chrono::steady_clock::now();
  int checked = 0, deepest = -1;
  for (const auto& c : configs) {
    for (int n = 1; n <= nmax; ++n) {
      auto cn = build_Cn(c, n);
      if (cn.vertices.empty() == (n >= c.q))
        return fail(config_name(c) + " n=" + std::to_string(n) + ": wrong emptiness");
      if (n < c.q) continue;
      const int nu = floor_div(n - c.q, 2 * c.q - 1) - 1;
      if (nu_bound(c, n) != nu) return fail("nu_bound disagrees at n=" + std::to_string(n));
      auto cert = is_k_acyclic(cn.flag(std::max(nu, 0) + 1), nu);
      if (!cert.acyclic)
        return fail(config_name(c) + " n=" + std::to_string(n) + " not " + std::to_string(nu) + "-acyclic");
      ++checked;
      deepest = std::max(deepest, nu);
    }
  }
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (took > seconds) return fail("took " + std::to_string(took) + " s");
  return {true, std::to_string(checked) + " complexes acyclic through nu (max degree " + std::to_string(deepest) + ")"};
}

// --- 3 ---------------------------------------------------------------------

Result petersen() {
  auto c5 = build_Cn(Config::symmetric(2), 5);
  if (c5.vertices.size() != 10 || c5.edges.size() != 15) return fail("wrong vertex or edge count");
  auto h = reduced_homology(c5.flag(2), 1);
  if (h.empty || h.degrees[0].betti != 0 || h.degrees[1].betti != 6 || !h.degrees[0].torsion.empty() ||
      !h.degrees[1].torsion.empty())
    return fail("homology differs from b0=0, b1=6");
  return {true, "10 vertices, 15 edges, b0=0, b1=6"};
}

// --- 4 ---------------------------------------------------------------------

Result morse_recursion() {
  int checked = 0;
  for (auto c : {Config::symmetric(2), Config::trivial(2), Config::symmetric(3), Config::trivial(3)}) {
    std::map<int, DecoratedComplex> ck;
    for (int n = c.q; n <= 8; ++n) {
      auto cn = build_Cn(c, n);
      for (const auto& a : cn.vertices) {
        if (a.support.front() > c.q) continue;
        const int k = n - c.q - (a.support.front() - 1);
        auto dl = desc_link_Cn(cn, a);
        if (k == 0) {
          if (!dl.complex.vertices.empty()) return fail(config_name(c) + ": nonempty link where C_0 is empty");
          ++checked;
          continue;
        }
        if (!ck.count(k)) ck.emplace(k, build_Cn(c, k));
        if (dl.complex.n != k || !(dl.complex == ck.at(k)))
          return fail(config_name(c) + " n=" + std::to_string(n) + ": link is not C_" + std::to_string(k));
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " descending links equal C_k"};
}

// --- 5 ---------------------------------------------------------------------

HomologyResult poset_homology(const GenPoset& p, int through) {
  return reduced_homology(order_complex(underlying_poset(p).poset, through + 1), through);
}

bool same_homology(const HomologyResult& a, const HomologyResult& b) {
  if (a.empty != b.empty || a.degrees.size() != b.degrees.size()) return false;
  for (std::size_t i = 0; i < a.degrees.size(); ++i)
    if (a.degrees[i].betti != b.degrees[i].betti || a.degrees[i].torsion != b.degrees[i].torsion) return false;
  return true;
}

std::size_t acyclic_components(const GenPoset& p) {
  auto u = underlying_poset(p).poset;
  std::size_t good = 0;
  for (const auto& comp : connected_components(u)) {
    auto sub = u.full_subcategory(comp);
    int top = height(sub);
    if (poset_homology(sub, top).vanishes_through(top)) ++good;
  }
  return good;
}

Result star_vs_full(double seconds) {
  auto t0 = std::chrono::steady_clock::now();
  for (auto c : {Config::symmetric(2), Config::trivial(2)}) {
    for (int n = 2; n <= 4; ++n) {
      auto full = enumerate_desc_link(c, n);
      auto star = enumerate_desc_link_star(c, n);
      int top = std::max(full.poset.empty() ? 0 : height(underlying_poset(full.poset).poset),
                         star.poset.empty() ? 0 : height(underlying_poset(star.poset).poset));
      if (!same_homology(poset_homology(full.poset, top), poset_homology(star.poset, top)))
        return fail(config_name(c) + " n=" + std::to_string(n) + ": homology differs");
      if (n == 3 && c.D.order() == 2) {
        if (full.records.size() != 6 || star.records.size() != 3)
          return fail("n=3 Sym(2): " + std::to_string(full.records.size()) + " vs " +
                      std::to_string(star.records.size()) + " objects");
        if (connected_components(underlying_poset(full.poset).poset).size() != 3 ||
            connected_components(underlying_poset(star.poset).poset).size() != 3 ||
            acyclic_components(full.poset) != 3 || acyclic_components(star.poset) != 3)
          return fail("n=3 Sym(2): expected 3 acyclic components in each model");
      }
    }
  }
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (took > seconds) return fail("took " + std::to_string(took) + " s");
  return {true, "equal homology for n=2..4; n=3 Sym(2): 6 vs 3 objects, 3+3 acyclic components"};
}

// --- 6 ---------------------------------------------------------------------

bool coarsens(const std::vector<Address>& fine, const std::vector<Address>& coarse) {
  for (const auto& a : fine) {
    bool inside = false;
    for (const auto& b : coarse)
      inside = inside || (a.summand == b.summand && b.word.size() <= a.word.size() &&
                          std::equal(b.word.begin(), b.word.end(), a.word.begin()));
    if (!inside) return false;
  }
  return true;
}

Result partition_cones() {
  int checked = 0;
  for (auto c : {Config::symmetric(2), Config::trivial(2)}) {
    for (int n = 1; n <= 5; ++n) {
      for (const auto& rec : enumerate_desc_link(c, n).records) {
        if (rec.very_elementary(c.q)) continue;
        auto pp = partition_poset(rec, c);
        const auto& P = pp.partitions;
        for (std::size_t i = 0; i < P.size(); ++i) {
          if (!coarsens(P[i], P[pp.F[i]])) return fail(rec.id() + ": P >= F(P) fails");
          if (!coarsens(P[pp.p_nu], P[pp.F[i]])) return fail(rec.id() + ": P_nu >= F(P) fails");
          for (std::size_t j = 0; j < P.size(); ++j)
            if (coarsens(P[i], P[j]) && !coarsens(P[pp.F[i]], P[pp.F[j]])) return fail(rec.id() + ": F not monotone");
        }
        int top = height(pp.poset);
        auto h = poset_homology(pp.poset, top);
        if (h.empty || !h.vanishes_through(top)) return fail(rec.id() + ": homology does not vanish");
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " partition posets are cones with vanishing homology"};
}

// --- 7 ---------------------------------------------------------------------

std::vector<Address> probe_points(std::mt19937_64& rng, const Config& c, int depth, std::size_t max_points) {
  std::size_t total = static_cast<std::size_t>(c.r);
  for (int i = 0; i < depth && total <= max_points; ++i) total *= static_cast<std::size_t>(c.q);
  if (total <= max_points) return oracle::addresses_at_depth(c.q, c.r, depth);
  std::vector<Address> out;
  for (std::size_t i = 0; i < max_points; ++i) {
    Address a{std::uniform_int_distribution<int>(1, c.r)(rng), {}};
    for (int d = 0; d < depth; ++d) a.word.push_back(static_cast<std::uint8_t>(rng() % static_cast<unsigned>(c.q)));
    out.push_back(std::move(a));
  }
  return out;
}

Result group_arithmetic() {
  std::mt19937_64 rng(7001);
  std::vector<Config> configs{Config::symmetric(2), Config::trivial(2), Config::symmetric(2, 2), Config::symmetric(3),
                              Config(3, 1, parse_subgroup(3, "231"))};
  for (int t = 0; t < 1000; ++t) {
    const auto& c = configs[static_cast<std::size_t>(t) % configs.size()];
    const auto id = Spheromorphism::identity(c);
    auto a = oracle::random_map(rng, c, c.r, c.r, 4);
    auto b = oracle::random_map(rng, c, c.r, c.r, 4);
    auto d = oracle::random_map(rng, c, c.r, c.r, 4);
    const std::string where = "triple " + std::to_string(t) + " (" + config_name(c) + ")";
    if (!(compose(compose(a, b), d) == compose(a, compose(b, d)))) return fail(where + ": associativity");
    auto ai = inverse(a);
    if (!(compose(a, ai) == id) || !(compose(ai, a) == id)) return fail(where + ": inverse law");
    auto leaf = static_cast<std::size_t>(rng() % a.domain().leaves().size());
    auto expanded = expand_leaf(a, leaf);
    auto ca = canonical_form(a);
    if (!(canonical_form(ca) == ca) || !(canonical_form(expanded) == ca))
      return fail(where + ": canonical form not idempotent");
    auto ab = compose(a, b);
    for (const auto& x : probe_points(rng, c, 12, 4096)) {
      auto bx = oracle::apply(b, x);
      if (!bx || oracle::apply(ab, x) != oracle::apply(a, *bx)) return fail(where + ": composite action at " + x.str());
      if (oracle::apply(ai, x) != oracle::apply_inverse(a, x)) return fail(where + ": inverse action at " + x.str());
      if (oracle::apply(expanded, x) != oracle::apply(a, x)) return fail(where + ": expanded action at " + x.str());
    }
  }
  return {true, "1000 triples: associativity, inverses, canonical form, depth-12 action"};
}

// --- 8 ---------------------------------------------------------------------

Spheromorphism strict_element(const Config& c, int m, const std::vector<LabeledIsometry>& parts) {
  std::vector<Spheromorphism::Piece> pieces;
  for (int s = 1; s <= m; ++s) pieces.push_back({Address{s, {}}, Address{s, {}}, parts[static_cast<std::size_t>(s - 1)]});
  return Spheromorphism::from_pieces(c, m, m, std::move(pieces));
}

// phi u phi^-1 checked pointwise at depth `depth`, using a cached phi^-1.
struct Conjugator {
  const Spheromorphism& phi;
  int q, n, depth;
  std::vector<Perm> allowed;
  std::map<Address, Address> pre;

  Conjugator(const Spheromorphism& p, const PermGroup& D, int n_, int depth_)
      : phi(p), q(D.degree()), n(n_), depth(depth_), allowed(D.elements()) {
    for (const auto& x : oracle::addresses_at_depth(q, n, depth)) pre.emplace(x, *oracle::apply_inverse(phi, x));
  }
  bool lands_in(const Spheromorphism& u, int k, const Address* only_below = nullptr) const {
    auto f = [&](const Address& x) -> std::optional<Address> {
      const Address& y = pre.at(x);
      if (only_below && !only_below->is_prefix_of(y)) return x;
      auto uy = oracle::apply(u, y);
      if (!uy) return std::nullopt;
      return oracle::apply(phi, *uy);
    };
    return oracle::is_strict_and_fixes(f, q, n, depth, k, allowed);
  }
};

Result subnormality() {
  std::mt19937_64 rng(8001);
  int nonzero = 0;
  for (int t = 0; t < 100; ++t) {
    const int r = 1 + t % 2;
    auto c = Config::symmetric(2, r);
    const int m = std::uniform_int_distribution<int>(1, 3)(rng);
    const int k = std::uniform_int_distribution<int>(0, 4)(rng);
    auto phi = oracle::random_map(rng, c, m, r, 3);
    const int kp = subnormal_depth(phi, k);
    const std::string where = "case " + std::to_string(t) + " k=" + std::to_string(k) + " k'=" + std::to_string(kp);
    Conjugator conj(phi, c.D, r, std::max({k + 1, kp + 3, 6}));
    const Perm swap = Perm::parse("21");

    auto single = [&](const Address& v) {
      std::vector<LabeledIsometry> parts(static_cast<std::size_t>(m), LabeledIsometry(c.q));
      parts[static_cast<std::size_t>(v.summand - 1)].set(v.word, swap);
      return strict_element(c, m, parts);
    };
    // every generator of U_{k'} at its shallowest level, and random products
    for (const auto& v : oracle::addresses_at_depth(c.q, m, kp))
      if (!conj.lands_in(single(v), k, &v)) return fail(where + ": containment fails at " + v.str());
    for (int s = 0; s < 10; ++s) {
      std::vector<LabeledIsometry> parts;
      for (int i = 0; i < m; ++i) {
        LabeledIsometry l(c.q);
        for (int j = 0; j < 4; ++j) {
          Word w;
          const int depth = kp + std::uniform_int_distribution<int>(0, 2)(rng);
          for (int e = 0; e < depth; ++e) w.push_back(static_cast<std::uint8_t>(rng() % 2));
          l.set(w, swap);
        }
        parts.push_back(l);
      }
      if (!conj.lands_in(strict_element(c, m, parts), k)) return fail(where + ": containment fails for a product");
    }
    if (kp == 0) continue;
    ++nonzero;
    bool escapes = false;
    for (const auto& v : oracle::addresses_at_depth(c.q, m, kp - 1))
      escapes = escapes || !conj.lands_in(single(v), k, &v);
    if (!escapes) return fail(where + ": k'-1 also satisfies the containment");
  }
  return {true, "100 sphero-vertices, " + std::to_string(nonzero) + " with k' > 0 shown minimal"};
}

// --- 9 ---------------------------------------------------------------------

Result stabilizers() {
  std::mt19937_64 rng(9001);
  std::size_t fixes = 0, moves = 0;
  struct Setup {
    Config c;
    int max_depth, probe;
  };
  std::vector<Setup> setups{{Config::symmetric(2), 3, 10}, {Config::trivial(2), 3, 10}, {Config::symmetric(3), 2, 7}};
  for (int t = 0; t < 200; ++t) {
    const auto& [c, max_depth, probe] = setups[static_cast<std::size_t>(t) % setups.size()];
    const int m = c.r + (c.q - 1) * std::uniform_int_distribution<int>(0, 2)(rng);
    auto phi = oracle::random_map(rng, c, m, c.r, max_depth);
    auto gamma = [&] {
      if (t % 2 == 0) return oracle::random_map(rng, c, c.r, c.r, max_depth);
      // conjugate a transformation of mB, strict or summand-permuting
      std::vector<int> perm(static_cast<std::size_t>(m));
      std::iota(perm.begin(), perm.end(), 1);
      if (t % 4 == 3) std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<Spheromorphism::Piece> pieces;
      for (int s = 1; s <= m; ++s)
        pieces.push_back({Address{s, {}}, Address{perm[static_cast<std::size_t>(s - 1)], {}},
                          oracle::random_isometry(rng, c.D, 2, 2)});
      auto s = Spheromorphism::from_pieces(c, m, m, std::move(pieces));
      return compose(phi, compose(s, inverse(phi)));
    }();
    auto f = [&](const Address& x) -> std::optional<Address> {
      auto y = oracle::apply(phi, x);
      if (!y) return std::nullopt;
      auto z = oracle::apply(gamma, *y);
      if (!z) return std::nullopt;
      return oracle::apply_inverse(phi, *z);
    };
    const bool expected = oracle::is_strict_and_fixes(f, c.q, m, probe, 0, c.D.elements());
    if (stabilizer_test(gamma, phi) != expected) return fail("pair " + std::to_string(t) + " misclassified");
    ++(expected ? fixes : moves);
  }

  std::size_t subgroups = 0, objects = 0;
  for (auto c : {Config::symmetric(2), Config::trivial(2), Config::symmetric(2, 2)}) {
    auto t = q_truncation(c, 2, c.r == 1 ? 4 : 3);
    objects += t.objects.size();
    for (const auto& h : small_subgroups(depth_quotient(c, 2), c.q)) {
      std::vector<Spheromorphism> H;
      for (const auto& l : h) H.push_back(diagonal_element(c, l));
      if (auto bad = upward_closure_violation(t, fixed_objects(t, H)))
        return fail(config_name(c) + ": fixed set not upward closed at " + t.poset.id(bad->first) + " -> " +
                    t.poset.id(bad->second));
      ++subgroups;
    }
  }
  return {true, "200 pairs (" + std::to_string(fixes) + " fixed, " + std::to_string(moves) + " moved); " +
                    std::to_string(subgroups) + " subgroups over " + std::to_string(objects) + " truncated objects"};
}

// --- 10 --------------------------------------------------------------------

Result trading() {
  std::mt19937 rng(10001);
  int runs = 0;
  for (int t = 0; t < 50; ++t) {
    auto s = oracle::random_schedule(rng);
    auto sp = sparsify(s);
    const std::string where = "schedule " + std::to_string(t);
    if (sp.indices != oracle::sparse_indices(s.connectivity)) return fail(where + ": sparse indices");
    if (!(sp.schedule.total() == s.total())) return fail(where + ": sparsify lost cells");
    for (std::size_t L = 1; L <= sp.schedule.size(); ++L) {
      auto input = sp.schedule.total(L);
      auto r = run_staircase(sp.schedule, L);
      if (!(euler_characteristic(r.final) == euler_characteristic(input))) return fail(where + ": chi changed");
      if (!(replay(sp.schedule, L, r.log) == r.final)) return fail(where + ": replay differs");
      if (r.final.counts() != oracle::staircase(sp.schedule, L)) return fail(where + ": differs from oracle");
      for (std::size_t d = 0; d < L; ++d)
        if (r.final.count(static_cast<int>(d)) != r.diagonal[d + 1].count(static_cast<int>(d)))
          return fail(where + ": dimension " + std::to_string(d) + " count unstable");
      std::uint64_t before = 0, after = 0;
      for (const auto& [key, n] : input.counts()) before += n;
      for (const auto& [key, n] : r.final.counts()) after += n;
      if (before != after || r.final.max_dimension() > std::max(input.max_dimension(), static_cast<int>(L)))
        return fail(where + ": output is not of finite type");
      ++runs;
    }
  }
  return {true, "50 schedules, " + std::to_string(runs) + " staircase runs"};
}

// --- 11 --------------------------------------------------------------------

Result orbit_counts() {
  std::string bad;
  for (auto c : {Config::symmetric(2), Config::trivial(2), Config::symmetric(3), Config::trivial(3)})
    for (int k = 1; k <= 5; ++k) {
      auto n = count_equivariant_cells(c, k, 0);
      if (n != static_cast<std::uint64_t>(k))
        bad += (bad.empty() ? "" : ", ") + config_name(c) + " k=" + std::to_string(k) + " gives " + std::to_string(n);
    }
  if (!bad.empty()) return fail(bad);
  return {true, "count = k for k <= 5"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"nu-bound grid q=2", [] { return nu_grid({Config::symmetric(2), Config::trivial(2)}, 11, 120); }},
      {"nu-bound grid q=3", [] { return nu_grid({Config::symmetric(3)}, 9, 120); }},
      {"Petersen pin", petersen},
      {"Morse recursion", morse_recursion},
      {"lk* vs lk", [] { return star_vs_full(60); }},
      {"partition-poset cones", partition_cones},
      {"group arithmetic", group_arithmetic},
      {"subnormality", subnormality},
      {"stabilizer and fixed-set closure", stabilizers},
      {"trading", trading},
      {"orbit count pin", orbit_counts},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.ok) ++failures;
    std::printf("%s %2zu %s: %s (%.1f s)\n", r.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.detail.c_str(),
                took);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
