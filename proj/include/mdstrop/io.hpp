#pragma once

// Text and JSON formats for matrices, linear equation systems, divisor classes and
// polytopes.

#include <mdstrop/linalg.hpp>
#include <mdstrop/polytope.hpp>
#include <mdstrop/toric.hpp>

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace mdstrop {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Whitespace-separated rationals, one row per line; '#' starts a comment.
inline RationalMatrix parse_matrix_text(const std::string& text) {
  std::vector<RationalVector> rows;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string tok;
    RationalVector row;
    while (ls >> tok) {
      try {
        row.push_back(parse_rational(tok));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), no);
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()),
                       no);
    rows.push_back(std::move(row));
  }
  return RationalMatrix::from_rows(rows);
}

inline std::string format_matrix_text(const RationalMatrix& m) {
  std::vector<std::vector<std::string>> cells(m.rows());
  std::size_t width = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      cells[i].push_back(to_string(m(i, j)));
      width = std::max(width, cells[i].back().size());
    }
  std::string out;
  for (const auto& r : cells) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out += ' ';
      out += std::string(width - r[j].size(), ' ') + r[j];
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json rational_json(const Rational& q) {
  if (is_integer(q)) {
    Integer n = numerator(q);
    if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
      return static_cast<std::int64_t>(n);
  }
  return to_string(q);
}

inline Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ParseError("expected an integer or a \"p/q\" string, got " + j.dump());
}

inline nlohmann::ordered_json vector_json(const RationalVector& v) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& q : v) a.push_back(rational_json(q));
  return a;
}

inline RationalVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("expected an array, got " + j.dump());
  RationalVector v;
  for (const auto& e : j) v.push_back(rational_from_json(e));
  return v;
}

inline nlohmann::ordered_json matrix_json(const RationalMatrix& m) {
  auto a = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i)));
  return a;
}

inline RationalMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("matrix must be an array of rows");
  std::vector<RationalVector> rows;
  for (const auto& r : j) {
    rows.push_back(vector_from_json(r));
    if (rows.back().size() != rows.front().size()) throw ParseError("ragged matrix");
  }
  return RationalMatrix::from_rows(rows);
}

/// Text matrix, or JSON when the document starts with '['.
inline RationalMatrix parse_matrix(const std::string& text) {
  auto p = text.find_first_not_of(" \t\r\n");
  if (p != std::string::npos && text[p] == '[') {
    try {
      return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("json: ") + e.what());
    }
  }
  return parse_matrix_text(text);
}

inline IntegerVector integer_vector_from_json(const nlohmann::json& j) {
  std::vector<std::int64_t> v;
  for (const auto& q : vector_from_json(j)) {
    if (!is_integer(q)) throw ParseError("expected integer entries, got " + to_string(q));
    v.push_back(to_int64(q));
  }
  return IntegerVector(std::move(v));
}

/// Comma-separated rationals, e.g. "0,1,3,1,0" or "1/2,-1".
inline RationalVector parse_vector_list(const std::string& s) {
  RationalVector v;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, ',')) {
    auto a = tok.find_first_not_of(" \t");
    auto b = tok.find_last_not_of(" \t");
    if (a == std::string::npos) throw ParseError("empty entry in list '" + s + "'");
    v.push_back(parse_rational(tok.substr(a, b - a + 1)));
  }
  return v;
}

inline IntegerVector parse_integer_list(const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& q : parse_vector_list(s)) {
    if (!is_integer(q)) throw ParseError("expected integers in '" + s + "'");
    out.push_back(to_int64(q));
  }
  return IntegerVector(std::move(out));
}

// ---------------------------------------------------------------------------
// Linear equation systems.
//
//   Q[x1,...,xn] {x2+x4+1, x1+x4+x5, ...}
//
// Constants stand for the homogenizing coordinate x0. Terms: c*xk, cxk, xk, -xk, c.
// "lhs = rhs" is accepted. Without a ring header variables are named x0, x1, ...
// and the ambient size is one more than the largest index.

struct EquationSystem {
  RationalMatrix forms;  // one row per equation, columns x0..x_{N-1}
  std::size_t ambient = 0;
};

namespace io_detail {

struct LinearForm {
  std::map<std::size_t, Rational> coeff;
};

class FormParser {
 public:
  FormParser(std::string s, const std::map<std::string, std::size_t>* names, int line)
      : s_(std::move(s)), names_(names), line_(line) {}

  LinearForm parse() {
    LinearForm f;
    side(f, 1);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '=') {
      ++pos_;
      side(f, -1);
    }
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_) + "'");
    return f;
  }

  std::size_t max_index = 0;

 private:
  void fail(const std::string& m) const { throw ParseError("equation '" + s_ + "': " + m, line_); }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void side(LinearForm& f, int sign) {
    skip();
    bool first = true;
    while (pos_ < s_.size() && s_[pos_] != '=') {
      int sg = sign;
      skip();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        if (s_[pos_] == '-') sg = -sg;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected + or -");
      }
      term(f, sg);
      first = false;
      skip();
    }
    if (first) fail("empty side");
  }

  void term(LinearForm& f, int sign) {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
    Rational c = 1;
    bool has_coeff = pos_ > start;
    if (has_coeff) c = parse_rational(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '*') {
      if (!has_coeff) fail("'*' without a coefficient");
      ++pos_;
      skip();
    }
    std::size_t var = 0;
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t vs = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(vs, pos_ - vs);
      name.erase(std::remove(name.begin(), name.end(), '_'), name.end());
      if (names_) {
        auto it = names_->find(name);
        if (it == names_->end()) fail("unknown variable " + name);
        var = it->second;
      } else {
        if (name.size() < 2 || name[0] != 'x' ||
            !std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
          fail("variables must be named x0, x1, ...");
        var = std::stoul(name.substr(1));
      }
    } else if (!has_coeff) {
      fail("expected a term");
    }
    max_index = std::max(max_index, var);
    f.coeff[var] += sign * c;
  }

  std::string s_;
  std::size_t pos_ = 0;
  const std::map<std::string, std::size_t>* names_;
  int line_;
};

}  // namespace io_detail

inline EquationSystem parse_equations_text(const std::string& text) {
  // Drop comments, keep line numbers for errors.
  std::string body;
  std::vector<int> line_of;  // line number of each character in body
  {
    std::istringstream in(text);
    std::string l;
    int no = 0;
    while (std::getline(in, l)) {
      ++no;
      auto h = l.find('#');
      if (h != std::string::npos) l.resize(h);
      for (char c : l) {
        body += c;
        line_of.push_back(no);
      }
      body += '\n';
      line_of.push_back(no);
    }
  }
  std::size_t p = 0;
  auto skip = [&] {
    while (p < body.size() && std::isspace(static_cast<unsigned char>(body[p]))) ++p;
  };
  auto line_at = [&](std::size_t i) { return line_of.empty() ? 0 : line_of[std::min(i, line_of.size() - 1)]; };
  skip();
  std::map<std::string, std::size_t> names;
  bool ring = false;
  if (p + 1 < body.size() && body[p] == 'Q' && (body[p + 1] == '[' || std::isspace(static_cast<unsigned char>(body[p + 1])))) {
    auto open = body.find('[', p);
    auto close = body.find(']', p);
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw ParseError("malformed ring header", line_at(p));
    std::istringstream vs(body.substr(open + 1, close - open - 1));
    std::string v;
    std::size_t k = 1;
    while (std::getline(vs, v, ',')) {
      v.erase(std::remove_if(v.begin(), v.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }), v.end());
      if (v.empty() || names.count(v)) throw ParseError("bad variable list in ring header", line_at(open));
      names[v] = k++;
    }
    ring = true;
    p = close + 1;
    skip();
  }
  std::vector<std::pair<std::string, int>> items;
  if (p < body.size() && body[p] == '{') {
    auto close = body.find('}', p);
    if (close == std::string::npos) throw ParseError("missing '}'", line_at(p));
    std::size_t start = p + 1;
    for (std::size_t i = start; i <= close; ++i)
      if (i == close || body[i] == ',') {
        // Report the line where the form's text begins, not where the previous one ended.
        std::size_t first = body.find_first_not_of(" \t\r\n", start);
        items.emplace_back(body.substr(start, i - start), line_at(first < i ? first : start));
        start = i + 1;
      }
    std::size_t after = body.find_first_not_of(" \t\r\n", close + 1);
    if (after != std::string::npos) throw ParseError("text after '}'", line_at(after));
  } else {
    std::size_t start = p;
    for (std::size_t i = p; i <= body.size(); ++i)
      if (i == body.size() || body[i] == '\n' || body[i] == ',') {
        items.emplace_back(body.substr(start, i - start), line_at(start));
        start = i + 1;
      }
  }
  std::vector<io_detail::LinearForm> forms;
  std::size_t max_index = 0;
  for (auto& [s, ln] : items) {
    if (s.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::string t = s;
    t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return c == '\n' || c == '\r'; }), t.end());
    io_detail::FormParser fp(t, ring ? &names : nullptr, ln);
    forms.push_back(fp.parse());
    max_index = std::max(max_index, fp.max_index);
  }
  if (forms.empty()) throw ParseError("no equations given");
  EquationSystem sys;
  sys.ambient = ring ? names.size() + 1 : max_index + 1;
  sys.forms = RationalMatrix(forms.size(), sys.ambient);
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (const auto& [k, c] : forms[i].coeff) sys.forms(i, k) = c;
  return sys;
}

/// JSON form: {"ambient": N, "forms": [[...], ...]}.
inline EquationSystem parse_equations(const std::string& text) {
  auto p = text.find_first_not_of(" \t\r\n");
  if (p != std::string::npos && text[p] == '{' && text.find("\"forms\"") != std::string::npos) {
    try {
      auto j = nlohmann::json::parse(text);
      EquationSystem sys;
      sys.forms = matrix_from_json(j.at("forms"));
      sys.ambient = j.value("ambient", sys.forms.cols());
      if (sys.forms.cols() != sys.ambient) throw ParseError("forms do not have 'ambient' columns");
      return sys;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("json: ") + e.what());
    }
  }
  return parse_equations_text(text);
}

// ---------------------------------------------------------------------------
// Divisor classes with optional names and ray coefficients.

struct NamedClass {
  std::string name;
  DivisorClass cls;
  std::optional<RationalVector> divisor;  // coefficients on the rays of a toric model
};

/// {"classes": [{"name": ..., "coords": [...], "divisor": [...]}, ...]}
inline std::vector<NamedClass> parse_class_list(const nlohmann::json& j) {
  std::vector<NamedClass> out;
  try {
    for (const auto& c : j.at("classes")) {
      NamedClass n;
      n.name = c.value("name", std::string{});
      n.cls.coords = integer_vector_from_json(c.at("coords"));
      if (c.contains("divisor")) n.divisor = vector_from_json(c["divisor"]);
      if (!out.empty() && n.cls.coords.size() != out.front().cls.coords.size())
        throw ParseError("class " + n.name + " has wrong length");
      out.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("class list: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polytopes.

inline nlohmann::ordered_json polytope_json(const Polytope& p) {
  nlohmann::ordered_json j;
  j["ambient_dim"] = p.ambient_dim();
  j["affine_dim"] = p.affine_dim();
  j["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : p.vertices()) j["vertices"].push_back(vector_json(v));
  j["halfspaces"] = nlohmann::ordered_json::array();
  for (const auto& h : p.halfspaces())
    j["halfspaces"].push_back({{"normal", h.normal.coords()}, {"offset", rational_json(h.offset)}});
  j["equations"] = nlohmann::ordered_json::array();
  for (const auto& e : p.equations())
    j["equations"].push_back({{"normal", e.normal.coords()}, {"value", rational_json(e.value)}});
  return j;
}

/// Accepts {"vertices": [...]} or {"halfspaces": [{"normal","offset"}], "ambient_dim"}.
inline Polytope polytope_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("vertices")) {
      std::vector<RationalVector> pts;
      for (const auto& v : j["vertices"]) pts.push_back(vector_from_json(v));
      if (pts.empty()) throw ParseError("polytope has no vertices");
      for (const auto& v : pts)
        if (v.size() != pts.front().size()) throw ParseError("vertices of different lengths");
      return hull(std::move(pts));
    }
    std::vector<RationalVector> normals;
    RationalVector offsets;
    for (const auto& h : j.at("halfspaces")) {
      normals.push_back(vector_from_json(h.at("normal")));
      offsets.push_back(rational_from_json(h.at("offset")));
    }
    std::size_t dim = j.contains("ambient_dim") ? j["ambient_dim"].get<std::size_t>()
                                                 : (normals.empty() ? 0 : normals.front().size());
    if (j.contains("equations"))
      for (const auto& e : j["equations"]) {
        auto n = vector_from_json(e.at("normal"));
        auto v = rational_from_json(e.at("value"));
        RationalVector m = n;
        for (auto& x : m) x = -x;
        normals.push_back(n);
        offsets.push_back(v);
        normals.push_back(m);
        offsets.push_back(-v);
      }
    return polytope_from_halfspaces(normals, offsets, dim);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("polytope: ") + e.what());
  }
}

/// Planar polygon with its lattice points, 40 px per unit.
inline std::string polytope_svg(const Polytope& p) {
  if (p.ambient_dim() != 2) throw MathError("svg output needs a polytope in the plane");
  auto d = [](const Rational& q) { return static_cast<double>(q); };
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& v : p.vertices()) {
    double x = d(v[0]), y = d(v[1]);
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    }
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  const double s = 40, pad = 20;
  auto px = [&](double x) { return pad + (x - xmin) * s; };
  auto py = [&](double y) { return pad + (ymax - y) * s; };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (xmax - xmin) * s + 2 * pad << "\" height=\""
    << (ymax - ymin) * s + 2 * pad << "\">\n";
  // Cyclic vertex order by angle about the centroid.
  std::vector<std::pair<double, double>> pts;
  double cx = 0, cy = 0;
  for (const auto& v : p.vertices()) {
    pts.emplace_back(d(v[0]), d(v[1]));
    cx += pts.back().first;
    cy += pts.back().second;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
    return std::atan2(a.second - cy, a.first - cx) < std::atan2(b.second - cy, b.first - cx);
  });
  o << "  <polygon points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << px(pts[i].first) << "," << py(pts[i].second);
  o << "\" fill=\"#dde8f4\" stroke=\"#1f4e79\" stroke-width=\"2\"/>\n";
  for (const auto& q : lattice_points(p).points)
    o << "  <circle cx=\"" << px(static_cast<double>(q[0])) << "\" cy=\"" << py(static_cast<double>(q[1]))
      << "\" r=\"3\" fill=\"#1f4e79\"/>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace mdstrop
