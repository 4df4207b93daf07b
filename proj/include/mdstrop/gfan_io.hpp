#pragma once

// Reader and writer for the Gfan SymmetricFan text format, and a JSON mirror.

#include <mdstrop/fan.hpp>

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mdstrop {

struct ConeGroup {
  std::size_t dim = 0;
  std::vector<Cone> cones;  // source order; each cone sorted
};

struct GfanDocument {
  std::vector<std::string> header;                          // "_key value" lines
  std::vector<std::string> section_order;
  std::map<std::string, std::vector<std::string>> raw;      // payload lines of every section, verbatim
  std::size_t ambient_dim = 0;
  std::size_t lineality_dim = 0;
  std::vector<IntegerVector> rays;
  std::vector<ConeGroup> cones;                             // CONES
  std::vector<ConeGroup> maximal_cones;                     // MAXIMAL_CONES
  std::map<std::size_t, std::string> annotations;           // ray index -> comment remainder, e.g. "(*)"
  Fan fan;

  bool has(const std::string& s) const { return raw.count(s) > 0; }
};

namespace gfan_detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

inline bool is_section_name(const std::string& t) {
  if (t.empty() || !std::isupper(static_cast<unsigned char>(t[0]))) return false;
  return std::all_of(t.begin(), t.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)) || c == '_' || std::isdigit(static_cast<unsigned char>(c)); });
}

inline std::int64_t parse_int(const std::string& t, int line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) throw ParseError("malformed integer '" + t + "'", line);
  return v;
}

inline std::string strip_comment(const std::string& l) {
  auto h = l.find('#');
  return h == std::string::npos ? l : l.substr(0, h);
}

struct Line {
  std::string text;
  int number;
};

// One value section: the single integer it holds.
inline std::int64_t single_int(const std::vector<Line>& payload, const std::string& name) {
  std::vector<std::pair<std::string, int>> toks;
  for (const auto& l : payload)
    for (auto& t : split_ws(strip_comment(l.text))) toks.emplace_back(t, l.number);
  if (toks.size() != 1)
    throw ParseError(name + " expects one integer", payload.empty() ? 0 : payload.front().number);
  return parse_int(toks[0].first, toks[0].second);
}

inline std::vector<ConeGroup> parse_cone_groups(const std::vector<Line>& payload, const std::string& name) {
  std::vector<ConeGroup> groups;
  for (const auto& l : payload) {
    std::string s = strip_comment(l.text);
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '{') {
        auto close = s.find('}', i);
        if (close == std::string::npos) throw ParseError("unterminated cone in " + name, l.number);
        Cone cone;
        for (auto& t : split_ws(s.substr(i + 1, close - i - 1))) {
          auto v = parse_int(t, l.number);
          if (v < 0) throw ParseError("negative ray index in " + name, l.number);
          cone.push_back(static_cast<std::size_t>(v));
        }
        std::sort(cone.begin(), cone.end());
        if (groups.empty()) groups.push_back({cone.size(), {}});
        groups.back().cones.push_back(std::move(cone));
        i = close + 1;
      } else {
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '{') ++j;
        std::string word = s.substr(i, j - i);
        if (word != "Dimension") throw ParseError("unexpected token '" + word + "' in " + name, l.number);
        i = j;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) throw ParseError("Dimension without a number in " + name, l.number);
        groups.push_back({static_cast<std::size_t>(parse_int(s.substr(i, j - i), l.number)), {}});
        i = j;
      }
    }
  }
  return groups;
}

}  // namespace gfan_detail

inline GfanDocument parse_gfan(const std::string& text) {
  using namespace gfan_detail;
  GfanDocument doc;
  std::map<std::string, std::vector<Line>> payload;
  std::map<std::string, int> section_line;
  std::string current;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string body = trim(strip_comment(line));
    if (current.empty() && !body.empty() && body[0] == '_') {
      doc.header.push_back(trim(line));
      continue;
    }
    auto toks = split_ws(body);
    if (!toks.empty() && is_section_name(toks[0])) {
      current = toks[0];
      if (current.find("ORBIT") != std::string::npos || current.find("SYMMETRY") != std::string::npos)
        throw ParseError("symmetry-compressed sections are not supported (" + current + ")", no);
      if (payload.count(current)) throw ParseError("duplicate section " + current, no);
      doc.section_order.push_back(current);
      payload[current];
      doc.raw[current];
      section_line[current] = no;
      auto pos = line.find(current);
      std::string rest = line.substr(pos + current.size());
      if (!trim(rest).empty()) {
        payload[current].push_back({rest, no});
        doc.raw[current].push_back(rest);
      }
      continue;
    }
    if (current.empty()) {
      if (!body.empty()) throw ParseError("text before the first section: '" + body + "'", no);
      continue;
    }
    doc.raw[current].push_back(line);
    if (!body.empty() || line.find('#') != std::string::npos) payload[current].push_back({line, no});
  }

  auto get_int = [&](const std::string& s) -> std::optional<std::int64_t> {
    if (!payload.count(s)) return std::nullopt;
    auto v = single_int(payload[s], s);
    if (v < 0) throw ParseError(s + " must be nonnegative", section_line[s]);
    return v;
  };

  auto ambient = get_int("AMBIENT_DIM");
  if (payload.count("RAYS") && !ambient) throw ParseError("RAYS given without AMBIENT_DIM", section_line["RAYS"]);
  doc.ambient_dim = ambient ? static_cast<std::size_t>(*ambient) : 0;
  if (auto l = get_int("LINEALITY_DIM")) doc.lineality_dim = static_cast<std::size_t>(*l);

  if (payload.count("RAYS")) {
    for (const auto& l : payload["RAYS"]) {
      auto toks = split_ws(strip_comment(l.text));
      if (toks.empty()) continue;
      std::vector<std::int64_t> v;
      for (const auto& t : toks) v.push_back(parse_int(t, l.number));
      if (v.size() != doc.ambient_dim)
        throw ParseError("ray of length " + std::to_string(v.size()) + ", AMBIENT_DIM is " +
                             std::to_string(doc.ambient_dim),
                         l.number);
      const std::size_t idx = doc.rays.size();
      doc.rays.emplace_back(std::move(v));
      auto h = l.text.find('#');
      if (h != std::string::npos) {
        std::string c = trim(l.text.substr(h + 1));
        auto parts = split_ws(c);
        if (!parts.empty() && parts[0] == std::to_string(idx)) c = trim(c.substr(parts[0].size()));
        if (!c.empty()) doc.annotations[idx] = c;
      }
    }
  }
  if (payload.count("LINEALITY_SPACE")) {
    std::size_t rows = 0;
    for (const auto& l : payload["LINEALITY_SPACE"]) {
      auto toks = split_ws(strip_comment(l.text));
      if (toks.empty()) continue;
      for (const auto& t : toks) parse_int(t, l.number);
      if (toks.size() != doc.ambient_dim) throw ParseError("lineality vector has wrong length", l.number);
      ++rows;
    }
    if (rows != doc.lineality_dim)
      throw ParseError("LINEALITY_DIM mismatch: declared " + std::to_string(doc.lineality_dim) + ", " +
                           std::to_string(rows) + " vectors given",
                       section_line["LINEALITY_SPACE"]);
  }

  auto check_range = [&](const std::vector<ConeGroup>& gs, const std::string& name) {
    for (const auto& g : gs)
      for (const auto& c : g.cones)
        for (auto i : c)
          if (i >= doc.rays.size()) {
            int ln = section_line[name];
            for (const auto& l : payload[name])
              if (strip_comment(l.text).find(std::to_string(i)) != std::string::npos) {
                ln = l.number;
                break;
              }
            throw ParseError("cone index " + std::to_string(i) + " out of range in " + name, ln);
          }
  };
  if (payload.count("CONES")) doc.cones = parse_cone_groups(payload["CONES"], "CONES");
  if (payload.count("MAXIMAL_CONES")) doc.maximal_cones = parse_cone_groups(payload["MAXIMAL_CONES"], "MAXIMAL_CONES");
  check_range(doc.cones, "CONES");
  check_range(doc.maximal_cones, "MAXIMAL_CONES");

  std::vector<Cone> all;
  for (const auto* gs : {&doc.cones, &doc.maximal_cones})
    for (const auto& g : *gs)
      for (const auto& c : g.cones) all.push_back(c);
  try {
    // Listings may omit faces (only MAXIMAL_CONES, or CONES without the top dimension).
    Fan listed(doc.ambient_dim, doc.rays, all, doc.lineality_dim);
    doc.fan = Fan::from_maximal_cones(doc.ambient_dim, doc.rays, listed.maximal_cones(), doc.lineality_dim);
  } catch (const MathError& e) {
    throw ParseError(e.what(), 0);
  }

  // Declared metadata must agree with what the cones say.
  if (auto n = get_int("N_RAYS"); n && static_cast<std::size_t>(*n) != doc.rays.size())
    throw ParseError("N_RAYS mismatch: declared " + std::to_string(*n) + ", found " + std::to_string(doc.rays.size()),
                     section_line["N_RAYS"]);
  if (auto d = get_int("DIM"); d && static_cast<std::size_t>(*d) != doc.fan.dim() + doc.lineality_dim && !all.empty())
    throw ParseError("DIM mismatch: declared " + std::to_string(*d) + ", computed " + std::to_string(doc.fan.dim()),
                     section_line["DIM"]);
  if (payload.count("F_VECTOR")) {
    std::vector<std::size_t> declared;
    for (const auto& l : payload["F_VECTOR"])
      for (auto& t : split_ws(strip_comment(l.text))) declared.push_back(static_cast<std::size_t>(parse_int(t, l.number)));
    if (declared != doc.fan.f_vector()) throw ParseError("F_VECTOR mismatch with the listed cones", section_line["F_VECTOR"]);
  }
  auto flag = [&](const std::string& s, bool computed) {
    if (auto v = get_int(s)) {
      if (*v > 1) throw ParseError(s + " must be 0 or 1", section_line[s]);
      if ((*v == 1) != computed) throw ParseError(s + " mismatch: declared " + std::to_string(*v), section_line[s]);
    }
  };
  flag("SIMPLICIAL", doc.fan.is_simplicial());
  if (!all.empty()) {
    bool pure = true;
    const std::size_t d = doc.fan.dim();
    for (const auto& c : doc.fan.maximal_cones())
      if (doc.fan.cone_dim(c) != d) pure = false;
    flag("PURE", pure);
  }
  return doc;
}

struct EmitOptions {
  bool comments = false;  // "# i annotation" after every ray
};

inline std::string emit_gfan(const GfanDocument& doc, EmitOptions opt = {}) {
  if (doc.rays != doc.fan.rays() || doc.ambient_dim != doc.fan.ambient_dim())
    throw MathError("emit_gfan: document rays disagree with its fan");
  for (const auto* gs : {&doc.cones, &doc.maximal_cones})
    for (const auto& g : *gs)
      for (const auto& c : g.cones)
        if (!c.empty() && !doc.fan.has_cone(c)) throw MathError("emit_gfan: listed cone is not in the fan");
  std::ostringstream out;
  for (const auto& h : doc.header) out << h << "\n";
  if (!doc.header.empty()) out << "\n";
  auto groups = [&](const std::vector<ConeGroup>& gs) {
    for (const auto& g : gs) {
      out << "\n Dimension " << g.dim << "\n";
      std::size_t k = 0;
      for (const auto& c : g.cones) {
        out << "{";
        for (std::size_t j = 0; j < c.size(); ++j) out << (j ? " " : "") << c[j];
        out << "}";
        if (++k % 12 == 0 && k != g.cones.size()) out << "\n";
      }
      if (g.dim == 0 && g.cones.empty()) out << "{}";
      out << "\n";
    }
  };
  const Fan& f = doc.fan;
  for (const auto& s : doc.section_order) {
    out << s << "\n";
    if (s == "AMBIENT_DIM") {
      out << doc.ambient_dim << "\n";
    } else if (s == "DIM") {
      out << f.dim() + doc.lineality_dim << "\n";
    } else if (s == "LINEALITY_DIM") {
      out << doc.lineality_dim << "\n";
    } else if (s == "RAYS") {
      for (std::size_t i = 0; i < doc.rays.size(); ++i) {
        for (std::size_t j = 0; j < doc.rays[i].size(); ++j) out << (j ? " " : "") << doc.rays[i][j];
        if (opt.comments) {
          out << "\t# " << i;
          auto a = doc.annotations.find(i);
          if (a != doc.annotations.end()) out << " " << a->second;
        }
        out << "\n";
      }
    } else if (s == "N_RAYS") {
      out << doc.rays.size() << "\n";
    } else if (s == "F_VECTOR") {
      auto fv = f.f_vector();
      for (std::size_t i = 0; i < fv.size(); ++i) out << (i ? " " : "") << fv[i];
      out << "\n";
    } else if (s == "SIMPLICIAL") {
      out << (f.is_simplicial() ? 1 : 0) << "\n";
    } else if (s == "PURE") {
      bool pure = true;
      for (const auto& c : f.maximal_cones())
        if (f.cone_dim(c) != f.dim()) pure = false;
      out << (pure ? 1 : 0) << "\n";
    } else if (s == "CONES") {
      groups(doc.cones);
    } else if (s == "MAXIMAL_CONES") {
      groups(doc.maximal_cones);
    } else {
      auto it = doc.raw.find(s);
      if (it != doc.raw.end())
        for (const auto& l : it->second) out << l << "\n";
      continue;
    }
    out << "\n";
  }
  return out.str();
}

/// Canonical document for a fan: all cones grouped by dimension, then the maximal ones.
inline GfanDocument make_document(const Fan& f, std::map<std::size_t, std::string> annotations = {},
                                  bool with_cones = true) {
  GfanDocument doc;
  doc.header = {"_application fan", "_version 2.2", "_type SymmetricFan"};
  doc.section_order = {"AMBIENT_DIM", "DIM", "LINEALITY_DIM", "RAYS", "N_RAYS", "F_VECTOR", "SIMPLICIAL", "PURE"};
  doc.ambient_dim = f.ambient_dim();
  doc.lineality_dim = f.lineality_dim();
  doc.rays = f.rays();
  doc.annotations = std::move(annotations);
  doc.fan = f;
  for (const auto& s : doc.section_order) doc.raw[s];
  if (with_cones) {
    doc.section_order.push_back("CONES");
    doc.section_order.push_back("MAXIMAL_CONES");
    doc.raw["CONES"];
    doc.raw["MAXIMAL_CONES"];
    std::map<std::size_t, ConeGroup> by_dim{{0, {0, {Cone{}}}}};
    for (const auto& c : f.cones()) {
      auto d = f.cone_dim(c);
      by_dim[d].dim = d;
      by_dim[d].cones.push_back(c);
    }
    for (auto& [d, g] : by_dim) doc.cones.push_back(std::move(g));
    std::map<std::size_t, ConeGroup> maxd;
    auto maxc = f.maximal_cones();
    if (maxc.empty()) maxd[0] = {0, {Cone{}}};
    for (const auto& c : maxc) {
      auto d = f.cone_dim(c);
      maxd[d].dim = d;
      maxd[d].cones.push_back(c);
    }
    for (auto& [d, g] : maxd) doc.maximal_cones.push_back(std::move(g));
  }
  return doc;
}

/// Re-lays out `doc` in the ray order, cone order and section order of `ref`, which must
/// describe the same fan up to renumbering of rays. Returns false if it does not.
inline bool align_to_reference(GfanDocument& doc, const GfanDocument& ref) {
  if (doc.rays.size() != ref.rays.size() || doc.ambient_dim != ref.ambient_dim) return false;
  std::map<IntegerVector, std::size_t> ref_index;
  for (std::size_t i = 0; i < ref.rays.size(); ++i) ref_index[ref.rays[i]] = i;
  std::vector<std::size_t> perm(doc.rays.size());
  for (std::size_t i = 0; i < doc.rays.size(); ++i) {
    auto it = ref_index.find(doc.rays[i]);
    if (it == ref_index.end()) return false;
    perm[i] = it->second;
  }
  std::set<Cone> mine;
  for (const auto& c : doc.fan.cones()) {
    Cone m;
    for (auto i : c) m.push_back(perm[i]);
    std::sort(m.begin(), m.end());
    mine.insert(m);
  }
  std::set<Cone> theirs(ref.fan.cones().begin(), ref.fan.cones().end());
  if (mine != theirs) return false;
  std::map<std::size_t, std::string> ann;
  for (const auto& [i, a] : doc.annotations) ann[perm[i]] = a;
  GfanDocument out = ref;
  if (!ann.empty() || ref.annotations.empty()) out.annotations = ann;
  doc = std::move(out);
  return true;
}

/// Comment-free token stream; braces are tokens of their own.
inline std::vector<std::string> gfan_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string s = gfan_detail::strip_comment(line);
    std::string spaced;
    for (char c : s) {
      if (c == '{' || c == '}') {
        spaced += ' ';
        spaced += c;
        spaced += ' ';
      } else {
        spaced += c;
      }
    }
    for (auto& t : gfan_detail::split_ws(spaced)) out.push_back(t);
  }
  return out;
}

inline nlohmann::ordered_json fan_to_json(const Fan& f, const std::map<std::size_t, std::string>& annotations = {}) {
  nlohmann::ordered_json j;
  j["ambient_dim"] = f.ambient_dim();
  j["lineality_dim"] = f.lineality_dim();
  j["rays"] = nlohmann::ordered_json::array();
  for (const auto& r : f.rays()) j["rays"].push_back(r.coords());
  nlohmann::ordered_json by = nlohmann::ordered_json::object();
  std::map<std::size_t, std::vector<Cone>> groups;
  for (const auto& c : f.cones()) groups[f.cone_dim(c)].push_back(c);
  for (const auto& [d, cs] : groups) by[std::to_string(d)] = cs;
  j["cones_by_dim"] = by;
  nlohmann::ordered_json ann = nlohmann::ordered_json::object();
  for (const auto& [i, a] : annotations) ann[std::to_string(i)] = a;
  j["annotations"] = ann;
  return j;
}

inline Fan fan_from_json(const nlohmann::json& j, std::map<std::size_t, std::string>* annotations = nullptr) {
  try {
    const std::size_t dim = j.at("ambient_dim").get<std::size_t>();
    const std::size_t lin = j.value("lineality_dim", std::size_t{0});
    std::vector<IntegerVector> rays;
    for (const auto& r : j.at("rays")) {
      IntegerVector v(r.get<std::vector<std::int64_t>>());
      if (v.size() != dim) throw ParseError("json fan: ray of wrong length");
      rays.push_back(std::move(v));
    }
    std::vector<Cone> cones;
    for (const auto& [k, cs] : j.at("cones_by_dim").items())
      for (const auto& c : cs) cones.push_back(c.get<Cone>());
    if (annotations && j.contains("annotations"))
      for (const auto& [k, a] : j["annotations"].items()) (*annotations)[std::stoul(k)] = a.get<std::string>();
    return Fan(dim, std::move(rays), std::move(cones), lin);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json fan: ") + e.what());
  } catch (const MathError& e) {
    throw ParseError(std::string("json fan: ") + e.what());
  }
}

}  // namespace mdstrop
