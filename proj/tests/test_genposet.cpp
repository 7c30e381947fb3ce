#include <gtest/gtest.h>

#include <random>

#include "neretin/genposet.hpp"
#include "neretin/homology.hpp"

using namespace neretin;

namespace {

GenPoset discrete(std::initializer_list<std::string> ids) { return GenPoset(ids, {}); }

HomologyResult homology_of(const GenPoset& p, int through) {
  return reduced_homology(order_complex(underlying_poset(p).poset), through);
}

std::vector<std::size_t> betti(const HomologyResult& h) {
  std::vector<std::size_t> out;
  for (const auto& d : h.degrees) out.push_back(d.betti);
  return out;
}

// Random honest poset on n objects (arrows only upwards in index), then some
// objects are doubled into isomorphic pairs.
GenPoset random_genposet(std::mt19937& rng, std::size_t n, double p, std::size_t doubles) {
  GenPoset base;
  for (std::size_t i = 0; i < n; ++i) base.add_object("x" + std::to_string(i));
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) base.add_arrow(i, j);
  base.close();
  GenPoset out = base;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t t = 0; t < doubles; ++t) {
    std::size_t x = pick(rng);
    std::size_t y = out.add_object("x" + std::to_string(x) + "'" + std::to_string(t));
    for (const auto& [a, b] : out.arrows()) {
      if (a == x) out.add_arrow(y, b);
      if (b == x) out.add_arrow(a, y);
    }
    out.add_arrow(x, y);
    out.add_arrow(y, x);
    out.close();
  }
  return out;
}

// Independent join oracle: simplices of A * B are unions of a simplex of A
// (or nothing) with a simplex of B (or nothing).
ChainComplex simplicial_join(const ChainComplex& a, const ChainComplex& b) {
  std::vector<std::vector<Simplex>> faces;
  auto add = [&](Simplex s) {
    std::size_t d = s.size() - 1;
    if (faces.size() <= d) faces.resize(d + 1);
    faces[d].push_back(std::move(s));
  };
  const auto shift = static_cast<std::uint32_t>(a.top_dimension() >= 0 ? a.size(0) : 0);
  std::vector<Simplex> sa{{}}, sb{{}};
  for (int d = 0; d <= a.top_dimension(); ++d)
    for (const auto& s : a.simplices(d)) sa.push_back(s);
  for (int d = 0; d <= b.top_dimension(); ++d)
    for (const auto& s : b.simplices(d)) sb.push_back(s);
  for (const auto& x : sa)
    for (const auto& y : sb) {
      if (x.empty() && y.empty()) continue;
      Simplex s = x;
      for (auto v : y) s.push_back(v + shift);
      add(std::move(s));
    }
  return ChainComplex::from_simplices(faces);
}

}  // namespace

TEST(Validate, Examples) {
  GenPoset chain({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}, {"0", "2"}});
  EXPECT_FALSE(validate(chain));

  GenPoset broken({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}});
  auto v = validate(broken);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, Violation::Kind::MissingComposite);
  EXPECT_EQ(std::make_tuple(v->a, v->b, v->c), std::make_tuple(0u, 1u, 2u));

  GenPoset iso({"A", "B"}, {{"A", "B"}, {"B", "A"}});
  EXPECT_FALSE(validate(iso));

  GenPoset ident({"A"}, {{"A", "A"}});
  ASSERT_TRUE(validate(ident));
  EXPECT_EQ(validate(ident)->kind, Violation::Kind::StoredIdentity);
}

TEST(Quotient, ChaoticPair) {
  GenPoset iso({"A", "B"}, {{"A", "B"}, {"B", "A"}});
  auto q = underlying_poset(iso);
  EXPECT_EQ(q.poset.size(), 1u);
  EXPECT_TRUE(q.poset.arrows().empty());
  EXPECT_EQ(q.projection, (std::vector<std::size_t>{0, 0}));
}

TEST(Quotient, TrivialSubgroupoidKeepsHonestPoset) {
  GenPoset chain({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}, {"0", "2"}});
  auto q = quotient_by_subgroupoid(chain, {});
  EXPECT_EQ(q.poset, chain);
}

TEST(Quotient, TwoClusters) {
  GenPoset c({"A", "B", "C", "D"},
             {{"A", "B"}, {"B", "A"}, {"C", "D"}, {"D", "C"}, {"A", "C"}, {"B", "D"}, {"A", "D"}, {"B", "C"}});
  ASSERT_FALSE(validate(c));
  auto q = underlying_poset(c);
  ASSERT_EQ(q.poset.size(), 2u);
  EXPECT_EQ(q.poset.objects(), (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(q.poset.arrows(), (std::set<GenPoset::Arrow>{{0, 1}}));

  // oracle: classes and Hom by definition
  std::set<std::pair<std::size_t, std::size_t>> expect;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      if (c.has_arrow(x, y) && q.projection[x] != q.projection[y]) expect.emplace(q.projection[x], q.projection[y]);
  EXPECT_EQ(q.poset.arrows(), expect);
  EXPECT_FALSE(q.poset.has_isomorphisms());
}

TEST(Quotient, RejectsNonGroupoid) {
  GenPoset chain({"0", "1"}, {{"0", "1"}});
  EXPECT_THROW(quotient_by_subgroupoid(chain, {{0, 1}}), InvalidArgument);
  GenPoset iso({"A", "B"}, {{"A", "B"}, {"B", "A"}});
  EXPECT_THROW(quotient_by_subgroupoid(iso, {{0, 1}}), InvalidArgument);
}

TEST(Join, Examples) {
  auto j = join(discrete({"a"}), discrete({"b"}));
  EXPECT_EQ(j.size(), 2u);
  EXPECT_EQ(j.arrows().size(), 1u);

  auto sq = join(discrete({"a", "b"}), discrete({"c", "d"}));
  EXPECT_FALSE(validate(sq));
  auto h = homology_of(sq, 1);
  EXPECT_EQ(betti(h), (std::vector<std::size_t>{0, 1}));

  auto c = GenPoset({"0", "1"}, {{"0", "1"}});
  EXPECT_EQ(join(c, GenPoset{}), c);

  EXPECT_THROW(join(discrete({"a"}), discrete({"a"})), InvalidArgument);
}

TEST(Coone, Acyclic) {
  for (auto [c, d] : {std::pair{discrete({"a"}), discrete({"b"})}, std::pair{GenPoset{}, discrete({"b", "c"})},
                      std::pair{discrete({"a", "b"}), discrete({"c", "d"})}}) {
    auto k = coone(c, d);
    EXPECT_FALSE(validate(k));
    EXPECT_EQ(k.size(), c.size() + d.size() + 1);
    auto h = homology_of(k, 2);
    EXPECT_FALSE(h.empty);
    EXPECT_TRUE(h.vanishes_through(2));
  }
  EXPECT_THROW(coone(discrete({"tip"}), discrete({"b"})), InvalidArgument);
}

TEST(OrderComplex, Examples) {
  GenPoset chain({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}, {"0", "2"}});
  auto oc = order_complex(chain);
  EXPECT_EQ(oc.size(2), 1u);
  EXPECT_TRUE(reduced_homology(oc, 2).vanishes_through(2));

  auto anti = order_complex(discrete({"a", "b", "c"}));
  EXPECT_EQ(anti.size(0), 3u);
  EXPECT_EQ(reduced_homology(anti, 0).at(0).betti, 2u);

  // face poset of the boundary of a triangle
  GenPoset faces({"1", "2", "3", "12", "13", "23"},
                 {{"1", "12"}, {"2", "12"}, {"1", "13"}, {"3", "13"}, {"2", "23"}, {"3", "23"}});
  auto h = reduced_homology(order_complex(faces), 1);
  EXPECT_EQ(betti(h), (std::vector<std::size_t>{0, 1}));

  GenPoset iso({"A", "B"}, {{"A", "B"}, {"B", "A"}});
  EXPECT_THROW(order_complex(iso), InvalidArgument);
  EXPECT_THROW(order_complex(GenPoset({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}})), InvalidArgument);
}

TEST(DescendingLink, Examples) {
  GenPoset c({"a", "b", "x", "y"}, {{"a", "b"}, {"a", "x"}, {"b", "x"}});
  std::vector<bool> lower{true, true, false, true};
  auto dl = descending_link(c, 2, lower);
  EXPECT_EQ(dl.over.size(), 2u);
  EXPECT_TRUE(dl.under.empty());
  EXPECT_EQ(dl.link().size(), 2u);

  auto iso_free = descending_link(c, 2, {false, false, false, true});
  EXPECT_TRUE(iso_free.over.empty());
  EXPECT_TRUE(iso_free.under.empty());

  EXPECT_THROW(descending_link(c, 0, lower), InvalidArgument);
  GenPoset iso({"A", "B"}, {{"A", "B"}, {"B", "A"}});
  EXPECT_THROW(descending_link(iso, 1, {true, false}), InvalidArgument);
}

TEST(FixedSubcategory, Examples) {
  GenPoset c({"a", "b", "t"}, {{"a", "t"}, {"b", "t"}});
  EXPECT_EQ(fixed_subcategory(c, {{0, 1, 2}}), c);
  auto f = fixed_subcategory(c, {{1, 0, 2}});
  EXPECT_EQ(f.objects(), (std::vector<std::string>{"t"}));
  EXPECT_THROW(fixed_subcategory(c, {{0, 2, 1}}), InvalidArgument);
  EXPECT_THROW(fixed_subcategory(c, {{0, 0, 2}}), InvalidArgument);
}

TEST(Morse, Checks) {
  GenPoset c({"A", "B", "C"}, {{"A", "B"}, {"B", "A"}, {"A", "C"}, {"B", "C"}});
  auto good = check_morse(c, {1, 1, 2});
  EXPECT_TRUE(good.generalized);
  EXPECT_TRUE(good.well_behaved);
  auto flat = check_morse(c, {1, 1, 1});
  EXPECT_FALSE(flat.generalized);
  auto split = check_morse(c, {1, 2, 3});
  EXPECT_TRUE(split.generalized);
  EXPECT_FALSE(split.well_behaved);
  auto partial = check_morse(c, {std::nullopt, std::nullopt, 1});
  EXPECT_TRUE(partial.generalized && partial.well_behaved);
}

TEST(GenPosetJson, RoundTrip) {
  GenPoset c({"b", "a"}, {{"b", "a"}});
  auto j = to_json(c);
  EXPECT_EQ(j.dump(), R"({"objects":["a","b"],"arrows":[["b","a"]]})");
  auto back = genposet_from_json(j);
  EXPECT_TRUE(find_isomorphism(back, c));
  EXPECT_THROW(genposet_from_json(Json::parse(R"({"objects":["a"]})")), InvalidArgument);
  EXPECT_THROW(genposet_from_json(Json::parse(R"({"objects":["a"],"arrows":[["a","z"]]})")), InvalidArgument);
}

// Collapsing a sub-cluster first and the rest afterwards gives the same
// underlying poset, and the homology is that of the generalized poset.
TEST(GenPosetProperty, CollapsesCompose) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto c = random_genposet(rng, 6, 0.35, 3);
    ASSERT_FALSE(validate(c));
    auto full = underlying_poset(c);
    ASSERT_FALSE(full.poset.has_isomorphisms());
    auto isos = isomorphism_groupoid(c);
    // a smaller groupoid: the isomorphism cluster of one object
    std::vector<GenPoset::Arrow> part;
    if (!isos.empty()) {
      auto x = isos.front().first;
      for (const auto& [a, b] : isos)
        if (c.isomorphic(a, x) && c.isomorphic(b, x)) part.emplace_back(a, b);
    }
    auto first = quotient_by_subgroupoid(c, part);
    ASSERT_FALSE(validate(first.poset));
    auto second = underlying_poset(first.poset);
    EXPECT_TRUE(find_isomorphism(second.poset, full.poset));
    EXPECT_EQ(betti(homology_of(c, 2)), betti(homology_of(first.poset, 2)));
  }
}

TEST(GenPosetProperty, CooneAlwaysAcyclic) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = random_genposet(rng, 4, 0.3, 1);
    auto d = random_genposet(rng, 4, 0.3, 1);
    GenPoset d2;
    for (const auto& o : d.objects()) d2.add_object("d" + o);
    for (const auto& [a, b] : d.arrows()) d2.add_arrow(a, b);
    EXPECT_TRUE(homology_of(coone(c, d2), 3).vanishes_through(3));
  }
}

TEST(GenPosetProperty, JoinMatchesSimplicialJoin) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = underlying_poset(random_genposet(rng, 5, 0.25, 0)).poset;
    auto d0 = underlying_poset(random_genposet(rng, 4, 0.25, 0)).poset;
    GenPoset d;
    for (const auto& o : d0.objects()) d.add_object("d" + o);
    for (const auto& [a, b] : d0.arrows()) d.add_arrow(a, b);
    auto jc = order_complex(join(c, d));
    auto oracle = simplicial_join(order_complex(c), order_complex(d));
    const int top = std::max(jc.top_dimension(), 0);
    auto h = reduced_homology(jc, top);
    auto ho = reduced_homology(oracle, top);
    ASSERT_EQ(h.degrees.size(), ho.degrees.size());
    for (std::size_t i = 0; i < h.degrees.size(); ++i) {
      EXPECT_EQ(h.degrees[i].betti, ho.degrees[i].betti);
      EXPECT_EQ(h.degrees[i].torsion, ho.degrees[i].torsion);
    }
    // reduced Euler characteristics multiply with a sign
    auto reduced_chi = [](const ChainComplex& x) { return x.euler_characteristic() - 1; };
    EXPECT_EQ(reduced_chi(jc), -reduced_chi(order_complex(c)) * reduced_chi(order_complex(d)));
  }
}

TEST(GenPosetProperty, DescendingLinkIndependentOfOrder) {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = random_genposet(rng, 6, 0.35, 2);
    auto isos = isomorphism_groupoid(c);
    if (isos.empty()) continue;
    auto [x, y] = isos.front();
    // lower part: everything strictly below or incomparable with x's cluster
    std::vector<bool> lower(c.size());
    for (std::size_t z = 0; z < c.size(); ++z) lower[z] = !c.isomorphic(z, x);
    auto lx = descending_link(c, x, lower);
    auto ly = descending_link(c, y, lower);
    EXPECT_TRUE(find_isomorphism(lx.link(), ly.link()));
  }
}

// Homological Morse bookkeeping: adding objects level by level, with
// acyclic descending links, leaves homology unchanged.
TEST(GenPosetProperty, MorseBookkeeping) {
  std::mt19937 rng(15);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto c = underlying_poset(random_genposet(rng, 7, 0.4, 0)).poset;
    // f = index, base = first three objects
    const std::size_t base = 3;
    bool all_acyclic = true;
    for (std::size_t x = base; x < c.size(); ++x) {
      std::vector<bool> lower(c.size(), false);
      for (std::size_t z = 0; z < x; ++z) lower[z] = true;
      auto link = descending_link(c, x, lower).link();
      auto oc = order_complex(link);
      if (link.empty() || !is_k_acyclic(oc, 1).acyclic) all_acyclic = false;
    }
    if (!all_acyclic) continue;
    std::vector<std::size_t> keep{0, 1, 2};
    auto hb = reduced_homology(order_complex(c.full_subcategory(keep)), 1);
    auto hc = reduced_homology(order_complex(c), 1);
    EXPECT_EQ(betti(hb), betti(hc));
    EXPECT_EQ(hb.empty, hc.empty);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}
