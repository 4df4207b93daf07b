#include "oracles.hpp"

#include <mdstrop/bergman.hpp>
#include <mdstrop/gfan_io.hpp>
#include <mdstrop/io.hpp>
#include <mdstrop/matroid.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace mdstrop;

namespace {

std::string data(const std::string& name) { return read_file(std::string(MDSTROP_DATA_DIR) + "/" + name); }

Matroid from_file(const std::string& name) {
  auto sys = parse_equations(data(name));
  return matroid_from_equations(sys.forms, sys.ambient);
}

Matroid u23() { return matroid_from_equations(RationalMatrix{{1, 1, 1}}, 3); }

std::set<IntegerVector> ray_set(const Fan& f) { return {f.rays().begin(), f.rays().end()}; }

}  // namespace

TEST(Matroid, TropicalLineIsU23) {
  auto m = u23();
  EXPECT_EQ(m.rank(), 2u);
  EXPECT_EQ(m.rank({0}), 1u);
  EXPECT_EQ(m.rank({0, 1, 2}), 2u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) EXPECT_EQ(m.rank({i, j}), 2u);
  EXPECT_EQ(m.circuits(), (std::vector<IndexSet>{{0, 1, 2}}));
  EXPECT_EQ(m.closure({0}).elements, (IndexSet{0}));
  auto flats = m.proper_flats();
  ASSERT_EQ(flats.size(), 3u);
  EXPECT_EQ(flats[0].elements, (IndexSet{0}));
  EXPECT_EQ(flats[2].elements, (IndexSet{2}));
}

TEST(Matroid, Example1ConcurrencePointsAreFlats) {
  auto m = from_file("example1_equations.txt");
  EXPECT_EQ(m.ground_size(), 6u);
  EXPECT_EQ(m.rank(), 3u);
  EXPECT_EQ(m.rank({1, 2, 3}), 2u);
  EXPECT_EQ(m.closure({1, 2}).elements, (IndexSet{1, 2, 3}));
  EXPECT_EQ(m.closure(m.ground_set()).elements, m.ground_set());
  auto flats = m.proper_flats();
  std::set<IndexSet> rank2;
  for (const auto& f : flats)
    if (f.rank == 2) rank2.insert(f.elements);
  EXPECT_EQ(rank2, (std::set<IndexSet>{{1, 2, 3}, {1, 4, 5}, {0, 2, 4}, {0, 3, 5}, {0, 1}, {2, 5}, {3, 4}}));
  EXPECT_EQ(flats.size(), 13u);
}

TEST(Matroid, Example1ConnectedFlats) {
  auto m = from_file("example1_equations.txt");
  EXPECT_FALSE(m.is_connected({2, 5}));
  EXPECT_TRUE(m.is_connected({1, 2, 3}));
  EXPECT_TRUE(m.is_connected({4}));
  std::size_t connected = 0;
  for (const auto& f : m.proper_flats()) {
    bool c = m.is_connected(f.elements);
    connected += c;
    if (!c) {
      EXPECT_EQ(f.elements.size(), 2u);
      EXPECT_EQ(f.rank, 2u);
    }
  }
  EXPECT_EQ(connected, 10u);
}

TEST(Matroid, Example1CircuitTest) {
  auto m = from_file("example1_equations.txt");
  const auto& cs = m.circuits();
  bool listed = std::find(cs.begin(), cs.end(), IndexSet{1, 2, 3, 4}) != cs.end();
  bool is_circuit = m.rank({1, 2, 3, 4}) == 3 && m.rank({1, 2, 3}) == 3 && m.rank({1, 2, 4}) == 3 &&
                    m.rank({1, 3, 4}) == 3 && m.rank({2, 3, 4}) == 3;
  EXPECT_EQ(listed, is_circuit);
  EXPECT_EQ(cs, oracle::circuits(m));
}

TEST(Matroid, Example2PlanesGiveFlatsForBothSystems) {
  const std::set<IndexSet> planes{{1, 2, 3, 4, 5, 6}, {1, 2, 3, 7, 8, 9}, {0, 1, 4, 5, 7, 8}, {0, 2, 4, 6, 7, 9},
                                  {0, 3, 5, 6, 8, 9}};
  for (auto name : {"example2_equations_a.txt", "example2_equations_b.txt"}) {
    auto m = from_file(name);
    EXPECT_EQ(m.rank(), 4u);
    EXPECT_EQ(m.ground_size(), 10u);
    std::set<IndexSet> big;
    for (const auto& f : m.proper_flats())
      if (f.rank == 3 && f.elements.size() == 6) big.insert(f.elements);
    EXPECT_EQ(big, planes) << name;
  }
}

TEST(Matroid, ParallelClassAndBooleanMatroid) {
  Matroid par(RationalMatrix{{1, 2, 0}, {0, 0, 1}});
  auto flats = par.proper_flats();
  ASSERT_EQ(flats.size(), 2u);
  EXPECT_EQ(flats[0].elements, (IndexSet{0, 1}));
  EXPECT_EQ(flats[1].elements, (IndexSet{2}));
  Matroid boolean(RationalMatrix::identity(4));
  EXPECT_TRUE(boolean.circuits().empty());
  EXPECT_FALSE(boolean.is_connected());
}

TEST(Matroid, Errors) {
  auto m = u23();
  EXPECT_THROW(m.rank({3}), MathError);
  EXPECT_THROW(m.closure({0, 7}), MathError);
  EXPECT_THROW(matroid_from_equations(RationalMatrix::identity(3), 3), MathError);
  EXPECT_THROW(matroid_from_equations(RationalMatrix{{1, 1}}, 3), MathError);
}

TEST(Matroid, LoopsAreSupported) {
  Matroid m(RationalMatrix{{1, 0, 1}, {0, 0, 1}});
  EXPECT_EQ(m.loops(), (IndexSet{1}));
  EXPECT_EQ(m.circuits().front(), (IndexSet{1}));
  for (const auto& f : m.proper_flats()) EXPECT_TRUE(std::binary_search(f.elements.begin(), f.elements.end(), 1u));
  EXPECT_EQ(m.proper_flats(), oracle::proper_flats(m));
}

TEST(Matroid, AgreesWithBruteForceOracles) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> rk(1, 4), extra(0, 5);
  for (int t = 0; t < 40; ++t) {
    std::size_t r = rk(rng), n = std::min<std::size_t>(r + extra(rng), 9);
    Matroid m(oracle::random_columns(rng, r, n, t % 3 == 0));
    EXPECT_EQ(m.proper_flats(), oracle::proper_flats(m));
    auto bc = oracle::circuits(m);
    EXPECT_EQ(m.circuits(), bc);
    for (const auto& c : bc) {
      EXPECT_EQ(m.rank(c), c.size() - 1);
    }
    std::uniform_int_distribution<std::uint64_t> sub(1, (std::uint64_t{1} << n) - 1);
    for (int k = 0; k < 20; ++k) {
      IndexSet s = bits::from_mask(sub(rng));
      EXPECT_EQ(m.is_connected(s), oracle::connected_by_circuits(bc, s));
    }
  }
}

TEST(Matroid, RankIsSubmodularAndFlatsMeetInFlats) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    Matroid m(oracle::random_columns(rng, 3, 7, false));
    const std::size_t n = m.ground_size();
    std::vector<std::size_t> r(std::size_t{1} << n);
    for (std::uint64_t s = 0; s < r.size(); ++s) r[s] = m.rank_mask(s);
    EXPECT_EQ(r[0], 0u);
    for (std::uint64_t a = 0; a < r.size(); ++a)
      for (std::uint64_t b = 0; b < r.size(); ++b) {
        ASSERT_LE(r[a | b] + r[a & b], r[a] + r[b]);
        if ((a & b) == a) {
          ASSERT_LE(r[a], r[b]);
        }
      }
    auto flats = m.proper_flats();
    for (const auto& f : flats)
      for (const auto& g : flats) {
        IndexSet meet;
        std::set_intersection(f.elements.begin(), f.elements.end(), g.elements.begin(), g.elements.end(),
                              std::back_inserter(meet));
        EXPECT_EQ(m.closure(meet).elements, meet);
      }
  }
}

TEST(Bergman, RayConventionMatchesListing) {
  EXPECT_EQ(ray_of_flat({1, 2, 3}, 6), (IntegerVector{-1, -1, -1, 0, 0}));
  EXPECT_EQ(ray_of_flat({0}, 6), (IntegerVector{1, 1, 1, 1, 1}));
  EXPECT_EQ(ray_of_flat({0, 2, 4}, 6), (IntegerVector{1, 0, 1, 0, 1}));
}

TEST(Bergman, TropicalLine) {
  auto m = u23();
  auto fine = fine_bergman(m);
  EXPECT_EQ(ray_set(fine.fan), (std::set<IntegerVector>{{1, 1}, {-1, 0}, {0, -1}}));
  EXPECT_EQ(fine.fan.f_vector(), (std::vector<std::size_t>{1, 3}));
  auto coarse = coarse_bergman(m);
  EXPECT_EQ(coarse.fan.rays(), fine.fan.rays());
  EXPECT_EQ(coarse.fan.cones(), fine.fan.cones());
  EXPECT_EQ(fine.convention, "max");
  EXPECT_EQ(fine.dehomogenized_by, 0u);
}

TEST(Bergman, BooleanOnTwoElements) {
  auto t = fine_bergman(Matroid(RationalMatrix::identity(2)));
  EXPECT_EQ(ray_set(t.fan), (std::set<IntegerVector>{{1}, {-1}}));
}

TEST(Bergman, Example1FineAndCoarse) {
  auto m = from_file("example1_equations.txt");
  auto fine = fine_bergman(m);
  EXPECT_EQ(fine.fan.rays().size(), 13u);
  EXPECT_EQ(fine.fan.dim(), 2u);
  EXPECT_TRUE(fine.fan.is_simplicial());
  EXPECT_TRUE(validate(fine.fan).ok());
  auto coarse = coarse_bergman(m);
  auto listing = parse_gfan(data("example1_trop.gfan"));
  EXPECT_EQ(ray_set(coarse.fan), ray_set(listing.fan));
  EXPECT_EQ(coarse.fan.f_vector(), (std::vector<std::size_t>{1, 10, 15}));
  std::set<std::set<IntegerVector>> mine, theirs;
  for (const auto& c : coarse.fan.maximal_cones()) {
    std::set<IntegerVector> s;
    for (auto i : c) s.insert(coarse.fan.rays()[i]);
    mine.insert(s);
  }
  for (const auto& c : listing.fan.maximal_cones()) {
    std::set<IntegerVector> s;
    for (auto i : c) s.insert(listing.fan.rays()[i]);
    theirs.insert(s);
  }
  EXPECT_EQ(mine, theirs);
  for (std::size_t i = 0; i < coarse.fan.rays().size(); ++i)
    EXPECT_EQ(ray_of_flat(coarse.flat_labels[i].elements, 6), coarse.fan.rays()[i]);
}

TEST(Bergman, Example2BothSystemsAgree) {
  auto a = coarse_bergman(from_file("example2_equations_a.txt"));
  auto b = coarse_bergman(from_file("example2_equations_b.txt"));
  EXPECT_EQ(a.fan.rays(), b.fan.rays());
  EXPECT_EQ(a.fan.cones(), b.fan.cones());
  EXPECT_EQ(a.fan.f_vector(), (std::vector<std::size_t>{1, 25, 105, 105}));
  EXPECT_EQ(ray_set(a.fan), ray_set(parse_gfan(data("example2_trop.gfan")).fan));
}

TEST(Bergman, RejectsLoops) {
  Matroid m(RationalMatrix{{1, 0, 1}, {0, 0, 1}});
  EXPECT_THROW(fine_bergman(m), MathError);
  EXPECT_THROW(coarse_bergman(m), MathError);
}

TEST(Bergman, MembershipExamples) {
  auto m = u23();
  EXPECT_TRUE(trop_membership(m, {1, 1}));
  EXPECT_FALSE(trop_membership(m, {2, 0}));
  EXPECT_TRUE(trop_membership(m, {-1, -1}, Convention::min));
  EXPECT_FALSE(trop_membership(m, {-2, 0}, Convention::min));
  auto e1 = from_file("example1_equations.txt");
  EXPECT_TRUE(trop_membership(e1, {1, 0, 1, 0, 1}));
  MembershipOracle o(e1);
  EXPECT_TRUE(o(IntegerVector{1, 0, 1, 0, 1}));
  EXPECT_FALSE(o(IntegerVector{1, 0, 0, 0, 0}));
}

TEST(Bergman, RandomMatroidsSupportAndBalancing) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> rk(2, 4), extra(1, 4);
  std::uniform_int_distribution<int> coef(1, 9);
  for (int t = 0; t < 8; ++t) {
    std::size_t r = rk(rng), n = std::min<std::size_t>(r + extra(rng), 8);
    auto m = oracle::random_loopless_matroid(rng, r, n);
    auto fine = fine_bergman(m);
    auto coarse = coarse_bergman(m);
    MembershipOracle in(m);
    auto fr = ray_set(fine.fan), cr = ray_set(coarse.fan);
    EXPECT_TRUE(std::includes(fr.begin(), fr.end(), cr.begin(), cr.end()));
    bool all_connected = true;
    for (const auto& f : m.proper_flats()) all_connected &= m.is_connected(f.elements);
    EXPECT_EQ(fr == cr, all_connected);
    for (const auto& tf : {fine.fan, coarse.fan}) {
      EXPECT_EQ(tf.dim(), r - 1);
      EXPECT_TRUE(validate(tf).pure);
      EXPECT_TRUE(tf.is_simplicial());
      EXPECT_TRUE(oracle::unbalanced_walls(tf).empty());
      for (const auto& ray : tf.rays()) EXPECT_TRUE(in(ray));
    }
    FanLocator coarse_loc(coarse.fan);
    for (const auto& c : fine.fan.maximal_cones()) {
      for (int k = 0; k < 50; ++k) {
        IntegerVector x(fine.fan.ambient_dim());
        for (auto i : c) {
          int a = coef(rng);
          for (std::size_t j = 0; j < x.size(); ++j) x[j] += a * fine.fan.rays()[i][j];
        }
        EXPECT_TRUE(in(x));
        EXPECT_TRUE(coarse_loc.in_support(x));
      }
    }
  }
}
