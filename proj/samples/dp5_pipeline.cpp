// The del Pezzo surface of degree 5 end to end: Cox ring degrees to the ambient
// fan, tropicalization, the flags in one ambient cone, and the Newton-Okounkov
// body of the anticanonical class as a Minkowski sum.
//
// usage: dp5_pipeline [data-dir]

#include <mdstrop/bergman.hpp>
#include <mdstrop/fan.hpp>
#include <mdstrop/gfan_io.hpp>
#include <mdstrop/io.hpp>
#include <mdstrop/polytope.hpp>
#include <mdstrop/toric.hpp>

#include <iostream>

using namespace mdstrop;

namespace {

std::string dir = MDSTROP_DATA_DIR;
std::string slurp(const std::string& name) { return read_file(dir + "/" + name); }

std::string fvec(const std::vector<std::size_t>& f) {
  std::string s;
  for (auto x : f) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) dir = argv[1];
  try {
    // Gale dual of the degree matrix; its rows are the rays of P^5 plus four exceptional rays.
    RationalMatrix gale = gale_transform(parse_matrix(slurp("example1_degree.txt")));
    std::cout << "gale transform: " << gale.rows() << " x " << gale.cols() << "\n";
    Fan z = ambient_fan_from_gale(gale);
    std::cout << "ambient fan Z: f-vector " << fvec(validate(z).fvector) << "\n";

    // The surface as a linear section of the torus.
    auto sys = parse_equations(slurp("example1_equations.txt"));
    Matroid m = matroid_from_equations(sys.forms, sys.ambient);
    auto trop = coarse_bergman(m);
    std::cout << "tropicalization: " << trop.fan.rays().size() << " rays, f-vector "
              << fvec(validate(trop.fan).fvector) << "\n";

    auto sub = subfan_meeting(z, MembershipOracle(m, Convention::min).as_predicate());
    std::cout << "cones of Z meeting it: f-vector " << fvec(validate(sub.fan).fvector) << "\n";

    // E13 E14 E23 E24 E3
    const Cone ambient{1, 2, 3, 4, 8};
    std::vector<IntegerVector> gens;
    for (auto i : ambient) gens.push_back(z.rays()[i]);
    auto chains = flag_chains(sub.fan, ray_indices(sub.fan, gens), 2);
    std::cout << "flags of depth 2 in {E13,E14,E23,E24,E3}: " << chains.size() << " ordered chains\n";

    // Minkowski basis by push-pull of the generators on Z.
    auto mj = nlohmann::json::parse(slurp("dp5_minkowski.json"));
    std::vector<DivisorClass> nef;
    for (const auto& n : parse_class_list(mj)) nef.push_back(n.cls);
    auto basis = push_pull_basis(nef, {matrix_from_json(mj["restrict"])}, {matrix_from_json(mj["push"])});
    std::cout << "minkowski basis (" << basis.size() << "):";
    for (const auto& b : basis) std::cout << " " << b.str();
    std::cout << "\n";

    // -K = 3H - E1 - E2 - E3 - E4 over the basis.
    auto bj = nlohmann::json::parse(slurp("dp5_basis.json"));
    auto named = parse_class_list(bj);
    std::vector<DivisorClass> shipped;
    for (const auto& n : named) shipped.push_back(n.cls);
    DivisorClass anti{IntegerVector{3, -1, -1, -1, -1}};
    auto d = minkowski_decompose(anti, shipped);
    if (!d.feasible) {
      std::cerr << "anticanonical class not in the cone of the basis\n";
      return 1;
    }
    std::cout << "-K = ";
    std::string sep;
    for (std::size_t i = 0; i < named.size(); ++i)
      if (d.coefficients[i] != 0) {
        std::cout << sep << d.coefficients[i] << "*(" << named[i].name << ")";
        sep = " + ";
      }
    std::cout << "\n";

    // Bodies on the toric surface of the degeneration.
    Fan t = parse_gfan(slurp("dp5_toric.gfan")).fan;
    Polytope sum;
    bool first = true;
    for (std::size_t i = 0; i < named.size(); ++i) {
      if (d.coefficients[i] == 0 || !named[i].divisor) continue;
      Polytope s = scale(divisor_polytope(t, *named[i].divisor), d.coefficients[i]);
      sum = first ? s : minkowski_sum(sum, s);
      first = false;
    }
    Polytope body = divisor_polytope(t, matrix_from_json(nlohmann::json::array({bj["target"]["divisor"]})).row(0));
    std::cout << "body vertices:";
    for (const auto& v : body.vertices()) std::cout << " (" << v[0] << "," << v[1] << ")";
    std::cout << "\n";
    std::cout << "equals the Minkowski sum: " << (sum == body ? "yes" : "no") << "\n";
    std::cout << "lattice points: " << lattice_points(body).points.size() << ", normalized volume "
              << normalized_volume(body) << " (degree of dP5)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
