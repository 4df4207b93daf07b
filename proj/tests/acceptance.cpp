// Acceptance run: one test per criterion, one PASS/FAIL line each.

#include "oracles.hpp"

#include <mdstrop/bergman.hpp>
#include <mdstrop/fan.hpp>
#include <mdstrop/gfan_io.hpp>
#include <mdstrop/io.hpp>
#include <mdstrop/polytope.hpp>
#include <mdstrop/toric.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>

using namespace mdstrop;

namespace {

std::string data(const std::string& name) { return std::string(MDSTROP_DATA_DIR) + "/" + name; }
std::string slurp(const std::string& name) { return read_file(data(name)); }

Matroid from_file(const std::string& name) {
  auto sys = parse_equations(slurp(name));
  return matroid_from_equations(sys.forms, sys.ambient);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string run_cli(const std::string& args) {
  std::string cmd = std::string(MDSTROP_CLI) + " " + args;
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  while (std::size_t k = fread(buf, 1, sizeof buf, p)) out.append(buf, k);
  pclose(p);
  return out;
}

std::vector<std::int64_t> ints(const RationalMatrix& m) {
  std::vector<std::int64_t> v;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      EXPECT_TRUE(is_integer(m(i, j)));
      v.push_back(to_int64(m(i, j)));
    }
  return v;
}

std::vector<IntegerVector> integer_rows(const RationalMatrix& m) {
  std::vector<IntegerVector> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::int64_t> v;
    for (std::size_t j = 0; j < m.cols(); ++j) v.push_back(to_int64(m(i, j)));
    rows.emplace_back(v);
  }
  return rows;
}

IntegerVector negate(IntegerVector v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -v[i];
  return v;
}

DivisorClass cls(std::vector<std::int64_t> v) { return {IntegerVector(std::move(v))}; }

RationalMatrix json_matrix(const nlohmann::json& m) {
  std::vector<RationalVector> rows;
  for (const auto& r : m) {
    RationalVector v;
    for (const auto& x : r) v.push_back(x.get<std::int64_t>());
    rows.push_back(v);
  }
  return RationalMatrix::from_rows(rows);
}

// The coarse fan laid out in the listing's ray order; fails the test when the fans differ.
GfanDocument aligned(const Fan& computed, const GfanDocument& listing) {
  auto doc = make_document(computed);
  EXPECT_TRUE(align_to_reference(doc, listing)) << "computed fan differs from the listing";
  return doc;
}

IntegerVector random_point_in(const Fan& f, const Cone& c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(1, 9);
  IntegerVector x(f.ambient_dim());
  for (auto i : c) {
    int a = coef(rng);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += a * f.rays()[i][j];
  }
  return x;
}

}  // namespace

TEST(Acceptance, Criterion1) {
  for (auto [deg, gale] : {std::pair{"example1_degree.txt", "example1_gale.txt"},
                          std::pair{"example2_degree.txt", "example2_gale.txt"}}) {
    RationalMatrix want = parse_matrix(slurp(gale));
    // Through the command line tool, then the library call it wraps.
    Stopwatch sw;
    std::string out = run_cli("gale " + data(deg));
    double cli_time = sw.seconds();
    RationalMatrix got = parse_matrix(out);
    ASSERT_EQ(got.rows(), want.rows()) << deg;
    ASSERT_EQ(got.cols(), want.cols()) << deg;
    EXPECT_EQ(ints(got), ints(want)) << deg;
    Stopwatch lib;
    RationalMatrix direct = gale_transform(parse_matrix(slurp(deg)));
    EXPECT_LT(lib.seconds(), 0.1);
    EXPECT_EQ(ints(direct), ints(want)) << deg;
    EXPECT_LT(cli_time, 0.5) << "process start included";
  }
}

TEST(Acceptance, Criterion2) {
  Stopwatch sw;
  auto listing = parse_gfan(slurp("example1_trop.gfan"));
  auto t = coarse_bergman(from_file("example1_equations.txt"));
  const Fan& f = t.fan;
  std::set<IntegerVector> got(f.rays().begin(), f.rays().end()), want(listing.rays.begin(), listing.rays.end());
  EXPECT_EQ(got.size(), 10u);
  EXPECT_EQ(got, want);
  auto doc = aligned(f, listing);
  std::set<Cone> two, listed;
  for (const auto& c : doc.fan.cones())
    if (c.size() == 2) two.insert(c);
  for (const auto& c : listing.fan.cones())
    if (c.size() == 2) listed.insert(c);
  EXPECT_EQ(two.size(), 15u);
  EXPECT_EQ(two, listed);
  auto rep = validate(f);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.fvector, (std::vector<std::size_t>{1, 10, 15}));
  EXPECT_TRUE(rep.simplicial);
  EXPECT_TRUE(rep.pure);
  EXPECT_EQ(rep.dim, 2u);
  EXPECT_EQ(f.lineality_dim(), 0u);
  EXPECT_LT(sw.seconds(), 1.0);
}

TEST(Acceptance, Criterion3) {
  Stopwatch sw;
  auto listing = parse_gfan(slurp("example2_trop.gfan"));
  auto a = coarse_bergman(from_file("example2_equations_a.txt")).fan;
  auto b = coarse_bergman(from_file("example2_equations_b.txt")).fan;
  EXPECT_EQ(a.rays(), b.rays());
  EXPECT_EQ(a.cones(), b.cones());
  auto rep = validate(b);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.fvector, (std::vector<std::size_t>{1, 25, 105, 105}));
  EXPECT_EQ(rep.dim, 3u);
  EXPECT_TRUE(rep.pure && rep.simplicial);
  std::set<IntegerVector> got(b.rays().begin(), b.rays().end()), want(listing.rays.begin(), listing.rays.end());
  EXPECT_EQ(got, want);
  auto doc = aligned(b, listing);
  const auto& r = doc.rays;
  ASSERT_EQ(r.size(), 25u);
  IntegerVector sum = r[5];
  sum += r[8];
  sum += r[11];
  EXPECT_EQ(r[2], sum);
  // Starred rays against the Gale rows, up to sign.
  auto gale = integer_rows(parse_matrix(slurp("example2_gale.txt")));
  ASSERT_EQ(gale.size(), 15u);
  std::set<IntegerVector> starred, rows;
  for (const auto& [i, text] : listing.annotations)
    if (text == "(*)") starred.insert(listing.rays[i]);
  EXPECT_EQ(starred.size(), 15u);
  for (const auto& g : gale) {
    bool hit = starred.count(g) || starred.count(negate(g));
    EXPECT_TRUE(hit) << g.str();
    rows.insert(starred.count(g) ? g : negate(g));
  }
  EXPECT_EQ(rows, starred);
  EXPECT_LT(sw.seconds(), 10.0);
}

TEST(Acceptance, Criterion4) {
  Stopwatch sw;
  auto tri = hull({RationalVector{0, 0}, RationalVector{0, 1}, RationalVector{1, 0}});
  auto seg = hull({RationalVector{0, 0}, RationalVector{1, 1}});
  auto body = minkowski_sum(tri, seg);
  std::set<RationalVector> want{{0, 0}, {1, 0}, {2, 1}, {1, 2}, {0, 1}};
  std::set<RationalVector> got(body.vertices().begin(), body.vertices().end());
  EXPECT_EQ(got, want);
  // Pairwise-sum hull oracle.
  std::vector<RationalVector> sums;
  for (const auto& p : tri.vertices())
    for (const auto& q : seg.vertices()) sums.push_back({p[0] + q[0], p[1] + q[1]});
  auto oracle_hull = oracle::hull_2d(sums);
  EXPECT_EQ(std::set<RationalVector>(oracle_hull.begin(), oracle_hull.end()), want);
  RationalVector mid{1, 1};
  EXPECT_TRUE(body.contains(mid));
  EXPECT_FALSE(body.is_vertex(mid));
  auto lp = lattice_points(body);
  EXPECT_TRUE(std::count(lp.points.begin(), lp.points.end(), IntegerVector{1, 1}));
  EXPECT_TRUE(lp.vertices_integral);
  EXPECT_EQ(normalized_volume(body), 5);
  EXPECT_EQ(abs(oracle::shoelace2(oracle_hull)), 5);
  EXPECT_LT(sw.seconds(), 0.1);
}

TEST(Acceptance, Criterion5) {
  auto fx = nlohmann::json::parse(slurp("dp5_minkowski.json"));
  std::vector<DivisorClass> gens;
  for (const auto& c : fx["classes"]) gens.push_back(cls(c["coords"].get<std::vector<std::int64_t>>()));
  auto basis = push_pull_basis(gens, {json_matrix(fx["restrict"])}, {json_matrix(fx["push"])});
  // The expected set, written out in H, E1..E4 coordinates.
  std::set<IntegerVector> want;
  want.insert(IntegerVector{1, 0, 0, 0, 0});
  want.insert(IntegerVector{2, -1, -1, -1, -1});
  for (int i = 1; i <= 4; ++i) {
    IntegerVector v{1, 0, 0, 0, 0};
    v[i] = -1;
    want.insert(v);
    for (int j = i + 1; j <= 4; ++j) {
      IntegerVector w = v;
      w[j] = -1;
      want.insert(w);
    }
  }
  ASSERT_EQ(want.size(), 12u);
  std::set<IntegerVector> got;
  for (const auto& c : basis) got.insert(c.coords);
  EXPECT_EQ(basis.size(), 12u);
  EXPECT_EQ(got, want);
  auto d = minkowski_decompose(cls({3, -1, -1, -1, -1}), basis);
  ASSERT_TRUE(d.feasible);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool expected_one = basis[i] == cls({1, 0, 0, 0, 0}) || basis[i] == cls({2, -1, -1, -1, -1});
    EXPECT_EQ(d.coefficients[i], expected_one ? 1 : 0) << basis[i].str();
  }
}

TEST(Acceptance, Criterion6) {
  Fan z = ambient_fan_from_gale(gale_transform(parse_matrix(slurp("example1_degree.txt"))));
  auto sub = subfan_meeting(z, MembershipOracle(from_file("example1_equations.txt"), Convention::min).as_predicate());
  EXPECT_TRUE(sub.mixed.empty());
  // Columns E12 E13 E14 E23 E24 E34 E1 E2 E3 E4; the cone {E13, E24, E14, E23, E3}.
  const Cone ambient{1, 2, 3, 4, 8};
  ASSERT_TRUE(z.has_cone(ambient));
  std::vector<IntegerVector> gens;
  for (auto i : ambient) gens.push_back(z.rays()[i]);
  auto chains = flag_chains(sub.fan, ray_indices(sub.fan, gens), 2);
  auto ambient_index = [&](std::size_t local) {
    return static_cast<std::size_t>(std::find(z.rays().begin(), z.rays().end(), sub.fan.rays()[local]) -
                                    z.rays().begin());
  };
  std::set<std::set<std::size_t>> tops;
  for (const auto& ch : chains) {
    ASSERT_EQ(ch.size(), 2u);
    ASSERT_EQ(ch[0].size(), 1u);
    ASSERT_EQ(ch[1].size(), 2u);
    EXPECT_TRUE(std::includes(ch[1].begin(), ch[1].end(), ch[0].begin(), ch[0].end()));
    tops.insert({ambient_index(ch[1][0]), ambient_index(ch[1][1])});
  }
  // E13.E24, E14.E23, E13.E3, E23.E3
  std::set<std::set<std::size_t>> want{{1, 4}, {2, 3}, {1, 8}, {3, 8}};
  EXPECT_EQ(tops, want);
  // Each listed 2-cone is reached from both of its rays.
  EXPECT_EQ(chains.size(), 2 * want.size());
}

TEST(Acceptance, Criterion7) {
  Stopwatch sw;
  std::mt19937_64 rng(7);

  // (a) fine and coarse structures have the same support, and it is the tropical variety.
  // (b) balancing on every generated fan.
  std::uniform_int_distribution<std::size_t> rk(2, 4);
  std::uniform_int_distribution<int> small(-2, 2);
  std::vector<Fan> generated;
  for (int t = 0; t < 20; ++t) {
    const std::size_t r = rk(rng);
    std::uniform_int_distribution<std::size_t> size(r + 1, 8);
    const std::size_t n = size(rng);
    auto m = oracle::random_loopless_matroid(rng, r, n);
    auto fine = fine_bergman(m).fan;
    auto coarse = coarse_bergman(m).fan;
    MembershipOracle in(m);
    FanLocator fine_loc(fine), coarse_loc(coarse);
    int misses = 0;
    for (const auto* pair : {&fine, &coarse}) {
      const FanLocator& other = pair == &fine ? coarse_loc : fine_loc;
      for (const auto& c : pair->maximal_cones())
        for (int k = 0; k < 1000; ++k) {
          auto x = random_point_in(*pair, c, rng);
          if (!in(x) || !other.in_support(x)) ++misses;
        }
    }
    EXPECT_EQ(misses, 0) << "matroid " << t << " rank " << r << " on " << n;
    // Ambient points with many ties.
    for (int k = 0; k < 1000; ++k) {
      IntegerVector x(n - 1);
      for (std::size_t j = 0; j + 1 < n; ++j) x[j] = small(rng);
      bool trop = in(x);
      EXPECT_EQ(fine_loc.in_support(x), trop) << x.str();
      EXPECT_EQ(coarse_loc.in_support(x), trop) << x.str();
    }
    generated.push_back(std::move(fine));
    generated.push_back(std::move(coarse));
  }
  generated.push_back(coarse_bergman(from_file("example1_equations.txt")).fan);
  generated.push_back(coarse_bergman(from_file("example2_equations_b.txt")).fan);
  for (const auto& f : generated) EXPECT_TRUE(oracle::unbalanced_walls(f).empty());

  // (c) token identity of the two listings through parse and emit.
  for (const char* name : {"example1_trop.gfan", "example2_trop.gfan"}) {
    std::string text = slurp(name);
    auto doc = parse_gfan(text);
    std::string out = emit_gfan(doc);
    EXPECT_EQ(gfan_tokens(out), gfan_tokens(text)) << name;
    EXPECT_EQ(emit_gfan(parse_gfan(out)), out) << name;
  }

  // (d) flats and circuits against brute force.
  std::uniform_int_distribution<std::size_t> rk_d(1, 5);
  for (int t = 0; t < 30; ++t) {
    const std::size_t r = rk_d(rng);
    std::uniform_int_distribution<std::size_t> size(r, 10);
    Matroid m(oracle::random_columns(rng, r, size(rng), t % 4 == 0));
    EXPECT_EQ(m.proper_flats(), oracle::proper_flats(m));
    EXPECT_EQ(m.circuits(), oracle::circuits(m));
  }

  // (e) stellar subdivision of complete simplicial fans.
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 2 + t % 3;
    Fan f = oracle::random_simplex_fan(rng, d);
    Fan g = stellar_subdivision(f, oracle::random_nonzero(rng, d, 3));
    auto problem = oracle::complete_simplicial_problem(g, rng, 30);
    EXPECT_FALSE(problem) << *problem;
    EXPECT_TRUE(validate(g).ok());
    FanLocator before(f), after(g);
    for (const auto& c : g.maximal_cones())
      for (int k = 0; k < 20; ++k) EXPECT_TRUE(before.in_support(random_point_in(g, c, rng)));
    for (const auto& c : f.maximal_cones())
      for (int k = 0; k < 20; ++k) EXPECT_TRUE(after.in_support(random_point_in(f, c, rng)));
  }
  EXPECT_LT(sw.seconds(), 60.0);
}

namespace {

class CriterionPrinter : public testing::EmptyTestEventListener {
  void OnTestPartResult(const testing::TestPartResult& r) override {
    if (r.failed() && reported_++ < 20)
      std::cout << "  " << (r.file_name() ? r.file_name() : "") << ":" << r.line_number() << ": " << r.summary()
                << "\n";
  }
  void OnTestEnd(const testing::TestInfo& info) override {
    std::string name = info.name();
    std::string number = name.substr(name.find_first_of("0123456789"));
    std::printf("criterion %s: %s (%.2f s)\n", number.c_str(), info.result()->Passed() ? "PASS" : "FAIL",
                static_cast<double>(info.result()->elapsed_time()) / 1000.0);
    std::fflush(stdout);
    reported_ = 0;
  }
  int reported_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  auto& listeners = testing::UnitTest::GetInstance()->listeners();
  delete listeners.Release(listeners.default_result_printer());
  listeners.Append(new CriterionPrinter);
  return RUN_ALL_TESTS();
}
