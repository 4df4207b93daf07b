// mdstrop: degree matrix -> ambient fan -> tropicalization -> subfan -> flags -> basis
// -> bodies. Exit codes: 0 ok, 1 mathematically infeasible (certificate on stdout),
// 2 input error.

#include <mdstrop/bergman.hpp>
#include <mdstrop/fan.hpp>
#include <mdstrop/gfan_io.hpp>
#include <mdstrop/io.hpp>
#include <mdstrop/polytope.hpp>
#include <mdstrop/toric.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace mdstrop;
using ojson = nlohmann::ordered_json;

namespace {

struct Infeasible : std::runtime_error {
  std::string body;
  Infeasible(const std::string& what, std::string b) : std::runtime_error(what), body(std::move(b)) {}
};

struct Common {
  std::string out;
  std::string format;
};

void add_common(CLI::App* c, Common& o, const std::string& default_format, std::vector<std::string> formats) {
  o.format = default_format;
  c->add_option("--out", o.out, "write the result to this file instead of stdout");
  c->add_option("--format", o.format, "output format")->check(CLI::IsMember(formats));
}

void write_result(const Common& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ParseError("cannot write " + o.out);
  f << text;
}

struct LoadedFan {
  Fan fan;
  std::map<std::size_t, std::string> annotations;
};

LoadedFan load_fan(const std::string& path) {
  std::string text = read_file(path);
  auto p = text.find_first_not_of(" \t\r\n");
  LoadedFan lf;
  if (p != std::string::npos && text[p] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    lf.fan = fan_from_json(j, &lf.annotations);
    return lf;
  }
  try {
    auto doc = parse_gfan(text);
    lf.fan = doc.fan;
    lf.annotations = doc.annotations;
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return lf;
}

nlohmann::json load_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string fan_output(const Fan& f, const std::string& format, const std::map<std::size_t, std::string>& ann = {},
                       bool comments = false) {
  if (format == "json") return fan_to_json(f, ann).dump(1) + "\n";
  return emit_gfan(make_document(f, ann), {.comments = comments});
}

std::string cone_str(const Cone& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + std::to_string(c[i]);
  return s + "}";
}

std::string classes_text(const std::vector<DivisorClass>& v) {
  std::string s;
  for (const auto& c : v) {
    for (std::size_t i = 0; i < c.coords.size(); ++i) s += (i ? " " : "") + std::to_string(c.coords[i]);
    s += "\n";
  }
  return s;
}

ojson decomposition_json(const Decomposition& d, const std::vector<std::string>& names) {
  ojson j;
  j["feasible"] = d.feasible;
  if (d.feasible) {
    j["coefficients"] = vector_json(d.coefficients);
    j["unique"] = d.unique;
    ojson terms = ojson::array();
    for (std::size_t i = 0; i < d.coefficients.size(); ++i)
      if (d.coefficients[i] != 0) terms.push_back({{"class", names[i]}, {"coefficient", rational_json(d.coefficients[i])}});
    j["terms"] = terms;
  } else {
    j["certificate"] = vector_json(d.certificate);
  }
  return j;
}

std::vector<std::string> class_names(const std::vector<DivisorClass>& b, const std::vector<NamedClass>* named) {
  std::vector<std::string> out;
  for (const auto& c : b) {
    std::string n = c.str();
    if (named)
      for (const auto& nc : *named)
        if (nc.cls == c && !nc.name.empty()) n = nc.name;
    out.push_back(n);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact toolkit for Bergman fans, toric ambient fans and Newton-Okounkov bodies"};
  app.require_subcommand(1);
  std::function<std::string()> run;
  const Common* active = nullptr;

  // gale
  Common gale_o;
  std::string gale_in;
  bool gale_reorder = false, gale_fan = false;
  auto* gale = app.add_subcommand("gale", "Gale transform (I ; -A) of a degree matrix (A | I)");
  gale->add_option("degree_matrix", gale_in)->required();
  gale->add_flag("--reorder", gale_reorder, "bring the matrix to block form by row reduction first");
  gale->add_flag("--fan", gale_fan, "emit the ambient fan on the Gale rows (projective space, then star subdivisions)");
  add_common(gale, gale_o, "text", {"text", "json"});
  gale->callback([&] {
    active = &gale_o;
    run = [&] {
      auto d = parse_matrix(read_file(gale_in));
      RationalMatrix g;
      ojson extra;
      if (gale_reorder) {
        auto r = gale_from_degree(d);
        g = r.gale;
        extra["column_order"] = r.column_order;
      } else {
        g = gale_transform(d);
      }
      if (gale_fan) return fan_output(ambient_fan_from_gale(g), gale_o.format == "json" ? "json" : "gfan");
      if (gale_o.format == "json") {
        ojson j;
        j["gale"] = matrix_json(g);
        if (!extra.empty()) j["column_order"] = extra["column_order"];
        return j.dump(1) + "\n";
      }
      return format_matrix_text(g);
    };
  });

  // tropicalize
  Common trop_o;
  std::string trop_in, trop_structure = "coarse", trop_labels, trop_reference;
  bool trop_comments = false;
  auto* trop = app.add_subcommand("tropicalize", "Bergman fan of the linear space cut out by the equations");
  trop->add_option("equations", trop_in)->required();
  trop->add_option("--structure", trop_structure)->check(CLI::IsMember({"fine", "coarse"}));
  trop->add_option("--labels", trop_labels, "write ray index -> flat elements as JSON to this file");
  trop->add_option("--reference", trop_reference, "lay the output out like this Gfan listing (same fan required)");
  trop->add_flag("--comments", trop_comments, "annotate rays with their index");
  add_common(trop, trop_o, "gfan", {"gfan", "json"});
  trop->callback([&] {
    active = &trop_o;
    run = [&] {
      auto sys = parse_equations(read_file(trop_in));
      auto m = matroid_from_equations(sys.forms, sys.ambient);
      auto t = trop_structure == "fine" ? fine_bergman(m) : coarse_bergman(m);
      std::string text;
      GfanDocument doc = make_document(t.fan);
      std::vector<std::size_t> order(t.fan.rays().size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      if (!trop_reference.empty()) {
        auto ref = parse_gfan(read_file(trop_reference));
        if (!align_to_reference(doc, ref)) throw Infeasible("fan differs from the reference listing", "");
        for (std::size_t i = 0; i < order.size(); ++i)
          order[i] = static_cast<std::size_t>(
              std::find(doc.rays.begin(), doc.rays.end(), t.fan.rays()[i]) - doc.rays.begin());
      }
      if (trop_o.format == "json") {
        const Fan& f = trop_reference.empty() ? t.fan : doc.fan;
        text = fan_to_json(f, doc.annotations).dump(1) + "\n";
      } else {
        text = emit_gfan(doc, {.comments = trop_comments});
      }
      if (!trop_labels.empty()) {
        ojson lab = ojson::object();
        std::vector<std::pair<std::size_t, std::size_t>> idx;
        for (std::size_t i = 0; i < order.size(); ++i) idx.emplace_back(order[i], i);
        std::sort(idx.begin(), idx.end());
        for (auto [pos, i] : idx) lab[std::to_string(pos)] = t.flat_labels[i].elements;
        std::ofstream lf(trop_labels);
        if (!lf) throw ParseError("cannot write " + trop_labels);
        lf << ojson{{"convention", t.convention}, {"dehomogenized_by", t.dehomogenized_by}, {"flats", lab}}.dump(1)
           << "\n";
      }
      return text;
    };
  });

  // fan-validate
  Common val_o;
  std::string val_in;
  auto* val = app.add_subcommand("fan-validate", "Structural checks and f-vector of a fan");
  val->add_option("fan", val_in)->required();
  add_common(val, val_o, "text", {"text", "json"});
  val->callback([&] {
    active = &val_o;
    run = [&] {
      auto lf = load_fan(val_in);
      auto r = validate(lf.fan);
      ojson j{{"dim", r.dim}, {"pure", r.pure}, {"simplicial", r.simplicial}, {"fvector", r.fvector},
              {"problems", r.problems}};
      std::string text;
      if (val_o.format == "json") {
        text = j.dump(1) + "\n";
      } else {
        text = "DIM " + std::to_string(r.dim) + "\nPURE " + (r.pure ? "1" : "0") + "\nSIMPLICIAL " +
               (r.simplicial ? "1" : "0") + "\nF_VECTOR";
        for (auto x : r.fvector) text += " " + std::to_string(x);
        text += "\n";
        for (const auto& p : r.problems) text += "PROBLEM " + p + "\n";
      }
      if (!r.ok()) throw Infeasible("fan failed validation", text);
      return text;
    };
  });

  // fan-stellar
  Common st_o;
  std::string st_in;
  std::vector<std::string> st_vectors;
  auto* st = app.add_subcommand("fan-stellar", "Star subdivision at one or more vectors, in order");
  st->add_option("fan", st_in)->required();
  st->add_option("--vector", st_vectors, "comma-separated integer vector; repeat for several")->required();
  add_common(st, st_o, "gfan", {"gfan", "json"});
  st->callback([&] {
    active = &st_o;
    run = [&] {
      auto lf = load_fan(st_in);
      std::vector<IntegerVector> vs;
      for (const auto& s : st_vectors) vs.push_back(parse_integer_list(s));
      Fan f = lf.fan;
      for (const auto& v : vs) f = stellar_subdivision(f, v);
      return fan_output(f, st_o.format);
    };
  });

  // subfan
  Common sub_o;
  std::string sub_in, sub_eq, sub_conv = "max";
  auto* sub = app.add_subcommand("subfan", "Cones of a fan lying in the tropicalization of a linear space");
  sub->add_option("fan", sub_in)->required();
  sub->add_option("--equations", sub_eq)->required();
  sub->add_option("--convention", sub_conv, "max, or min to test the negated point")
      ->check(CLI::IsMember({"max", "min"}));
  add_common(sub, sub_o, "gfan", {"gfan", "json"});
  sub->callback([&] {
    active = &sub_o;
    run = [&] {
      auto lf = load_fan(sub_in);
      auto sys = parse_equations(read_file(sub_eq));
      auto m = matroid_from_equations(sys.forms, sys.ambient);
      if (m.ground_size() != lf.fan.ambient_dim() + 1)
        throw ParseError("equations have " + std::to_string(m.ground_size()) + " coordinates, fan needs " +
                         std::to_string(lf.fan.ambient_dim() + 1));
      MembershipOracle o(m, sub_conv == "min" ? Convention::min : Convention::max);
      auto res = subfan_meeting(lf.fan, o.as_predicate());
      if (!res.mixed.empty()) {
        std::string body = "mixed cones (barycenter passes, some face fails):";
        for (const auto& c : res.mixed) body += " " + cone_str(c);
        throw Infeasible("subfan precondition violated", body + "\n");
      }
      std::map<std::size_t, std::string> ann;
      for (std::size_t i = 0; i < res.ray_origin.size(); ++i) ann[i] = "ambient " + std::to_string(res.ray_origin[i]);
      return fan_output(res.fan, sub_o.format, ann, true);
    };
  });

  // flags
  Common fl_o;
  std::string fl_in, fl_cone, fl_ambient;
  std::size_t fl_depth = 1;
  auto* fl = app.add_subcommand("flags", "Flag chains of a subfan inside one cone");
  fl->add_option("subfan", fl_in)->required();
  fl->add_option("--max-cone", fl_cone, "ray indices i,j,k of the cone")->required();
  fl->add_option("--depth", fl_depth, "chain length n");
  fl->add_option("--ambient", fl_ambient, "interpret --max-cone in this fan's ray numbering");
  add_common(fl, fl_o, "text", {"text", "json"});
  fl->callback([&] {
    active = &fl_o;
    run = [&] {
      auto lf = load_fan(fl_in);
      Cone cone;
      for (auto x : parse_integer_list(fl_cone)) {
        if (x < 0) throw ParseError("negative ray index in --max-cone");
        cone.push_back(static_cast<std::size_t>(x));
      }
      std::sort(cone.begin(), cone.end());
      if (!fl_ambient.empty()) {
        auto amb = load_fan(fl_ambient);
        std::vector<IntegerVector> vs;
        for (auto i : cone) {
          if (i >= amb.fan.rays().size()) throw ParseError("--max-cone index out of range");
          vs.push_back(amb.fan.rays()[i]);
        }
        if (!amb.fan.has_cone(cone)) throw ParseError("--max-cone is not a cone of the ambient fan");
        Cone in_sub;
        for (const auto& v : vs) {
          auto it = std::find(lf.fan.rays().begin(), lf.fan.rays().end(), v);
          if (it != lf.fan.rays().end()) in_sub.push_back(static_cast<std::size_t>(it - lf.fan.rays().begin()));
        }
        std::sort(in_sub.begin(), in_sub.end());
        cone = in_sub;
      } else {
        for (auto i : cone)
          if (i >= lf.fan.rays().size()) throw ParseError("--max-cone index out of range");
      }
      auto chains = flag_chains(lf.fan, cone, fl_depth);
      if (fl_o.format == "json") {
        ojson j = ojson::array();
        for (const auto& ch : chains) j.push_back(ch);
        return j.dump(1) + "\n";
      }
      std::string s;
      for (const auto& ch : chains) {
        for (std::size_t i = 0; i < ch.size(); ++i) s += (i ? " < " : "") + cone_str(ch[i]);
        s += "\n";
      }
      return s;
    };
  });

  // nef
  Common nef_o;
  std::string nef_in;
  auto* nef = app.add_subcommand("nef", "Class group and nef cone generators of a complete simplicial fan");
  nef->add_option("fan", nef_in)->required();
  add_common(nef, nef_o, "text", {"text", "json"});
  nef->callback([&] {
    active = &nef_o;
    run = [&] {
      auto lf = load_fan(nef_in);
      auto g = class_group_presentation(lf.fan);
      auto gens = nef_cone(lf.fan);
      if (nef_o.format == "json") {
        ojson j;
        j["class_projection"] = matrix_json(g.class_projection);
        j["nef"] = ojson::array();
        for (const auto& c : gens) j["nef"].push_back(c.coords.coords());
        j["walls"] = ojson::array();
        for (const auto& w : mori_curves(lf.fan, g))
          j["walls"].push_back({{"wall", w.wall}, {"relation", w.relation.coords()}});
        return j.dump(1) + "\n";
      }
      return classes_text(gens);
    };
  });

  // nobody
  Common nb_o;
  std::string nb_in, nb_coeffs, nb_basis, nb_class;
  auto* nb = app.add_subcommand("nobody", "Divisor polytope of sum a_i D_i, optionally as a Minkowski sum over a basis");
  nb->add_option("fan", nb_in)->required();
  nb->add_option("--coeffs", nb_coeffs, "coefficients a_i on the rays")->required();
  nb->add_option("--decompose", nb_basis, "basis file with classes and their ray divisors");
  nb->add_option("--class", nb_class, "class of the divisor in the basis coordinates (default: the file's target)");
  add_common(nb, nb_o, "json", {"json", "svg"});
  nb->callback([&] {
    active = &nb_o;
    run = [&] {
      auto lf = load_fan(nb_in);
      RationalVector a = parse_vector_list(nb_coeffs);
      Polytope body = divisor_polytope(lf.fan, a);
      ojson j;
      j["polytope"] = polytope_json(body);
      if (body.full_dimensional()) j["normalized_volume"] = rational_json(normalized_volume(body));
      auto lp = lattice_points(body);
      j["lattice_points"] = ojson::array();
      for (const auto& q : lp.points) j["lattice_points"].push_back(q.coords());
      if (!nb_basis.empty()) {
        auto bj = load_json(nb_basis);
        auto named = parse_class_list(bj);
        std::vector<DivisorClass> basis;
        for (const auto& n : named) basis.push_back(n.cls);
        DivisorClass target;
        if (!nb_class.empty()) {
          target.coords = parse_integer_list(nb_class);
        } else if (bj.contains("target") && bj["target"].contains("coords")) {
          target.coords = integer_vector_from_json(bj["target"]["coords"]);
        } else {
          throw ParseError(nb_basis + ": no target class; pass --class");
        }
        auto d = minkowski_decompose(target, basis);
        std::vector<std::string> names;
        for (const auto& n : named) names.push_back(n.name);
        if (!d.feasible) throw Infeasible("class is not in the cone of the basis", decomposition_json(d, names).dump(1) + "\n");
        j["decomposition"] = decomposition_json(d, names);
        std::optional<Polytope> sum;
        for (std::size_t i = 0; i < basis.size(); ++i) {
          if (d.coefficients[i] == 0) continue;
          if (!named[i].divisor) throw ParseError("basis class " + named[i].name + " has no divisor for its body");
          Polytope s = scale(divisor_polytope(lf.fan, *named[i].divisor), d.coefficients[i]);
          sum = sum ? minkowski_sum(*sum, s) : s;
        }
        if (sum) {
          j["minkowski_sum"] = polytope_json(*sum);
          j["sum_matches"] = (*sum == body);
        }
      }
      if (nb_o.format == "svg") return polytope_svg(body);
      return j.dump(1) + "\n";
    };
  });

  // minkowski
  Common mk_o;
  std::string mk_maps, mk_basis, mk_target;
  auto* mk = app.add_subcommand("minkowski", "Push-pull Minkowski basis and decomposition of a class over it");
  mk->add_option("--maps", mk_maps, "JSON with classes, restrict and push matrices");
  mk->add_option("--basis", mk_basis, "JSON with the basis classes directly");
  mk->add_option("--target", mk_target, "class to decompose");
  add_common(mk, mk_o, "json", {"json", "text"});
  mk->callback([&] {
    active = &mk_o;
    run = [&] {
      if (mk_maps.empty() == mk_basis.empty()) throw ParseError("give exactly one of --maps and --basis");
      std::vector<DivisorClass> basis;
      std::vector<NamedClass> named;
      if (!mk_maps.empty()) {
        auto j = load_json(mk_maps);
        std::vector<DivisorClass> gens;
        for (const auto& n : parse_class_list(j)) gens.push_back(n.cls);
        try {
          basis = push_pull_basis(gens, {matrix_from_json(j.at("restrict"))}, {matrix_from_json(j.at("push"))});
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(mk_maps + ": " + e.what());
        }
      } else {
        named = parse_class_list(load_json(mk_basis));
        for (const auto& n : named) basis.push_back(n.cls);
      }
      auto names = class_names(basis, named.empty() ? nullptr : &named);
      ojson out;
      out["basis"] = ojson::array();
      for (const auto& c : basis) out["basis"].push_back(c.coords.coords());
      std::string text = classes_text(basis);
      if (!mk_target.empty()) {
        auto d = minkowski_decompose({parse_integer_list(mk_target)}, basis);
        if (!d.feasible) throw Infeasible("target is not in the cone of the basis", decomposition_json(d, names).dump(1) + "\n");
        out["decomposition"] = decomposition_json(d, names);
        text += "coefficients";
        for (const auto& q : d.coefficients) text += " " + to_string(q);
        text += d.unique ? "\n" : "\nnot unique\n";
      }
      return mk_o.format == "json" ? out.dump(1) + "\n" : text;
    };
  });

  // volume
  Common vol_o;
  std::vector<std::string> vol_in;
  auto* vol = app.add_subcommand("volume", "Normalized volume and lattice points of a polytope or Minkowski sum");
  vol->add_option("polytopes", vol_in, "polytope JSON files; several are summed")->required();
  add_common(vol, vol_o, "json", {"json", "svg"});
  vol->callback([&] {
    active = &vol_o;
    run = [&] {
      std::optional<Polytope> p;
      for (const auto& f : vol_in) {
        auto q = polytope_from_json(load_json(f));
        p = p ? minkowski_sum(*p, q) : q;
      }
      if (vol_o.format == "svg") return polytope_svg(*p);
      ojson j;
      j["polytope"] = polytope_json(*p);
      j["normalized_volume"] = rational_json(normalized_volume(*p));
      auto lp = lattice_points(*p);
      j["lattice_points"] = ojson::array();
      for (const auto& q : lp.points) j["lattice_points"].push_back(q.coords());
      j["vertices_integral"] = lp.vertices_integral;
      return j.dump(1) + "\n";
    };
  });

  // convert
  Common cv_o;
  std::string cv_in;
  bool cv_comments = false;
  auto* cv = app.add_subcommand("convert", "Convert a fan between Gfan and JSON");
  cv->add_option("fan", cv_in)->required();
  cv->add_flag("--comments", cv_comments, "annotate rays in Gfan output");
  add_common(cv, cv_o, "json", {"gfan", "json"});
  cv->callback([&] {
    active = &cv_o;
    run = [&] {
      auto lf = load_fan(cv_in);
      return fan_output(lf.fan, cv_o.format, lf.annotations, cv_comments);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    std::string text = run();
    write_result(*active, text);
  } catch (const Infeasible& e) {
    std::cout << e.body;
    std::cerr << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const MathError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
