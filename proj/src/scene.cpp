#include "nmm/scene.hpp"

#include <algorithm>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace nmm {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("scene: " + msg);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw std::runtime_error("scene: line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KeyValue {
  int line = 0;
  std::string key, value;
};

std::vector<KeyValue> tokenize(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string s = trim(raw);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected key = value");
    KeyValue kv{line, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
    if (kv.key.empty()) fail_line(line, "empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_number(int line, const std::string& token) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE ||
      !std::isfinite(v))
    fail_line(line, "bad number '" + token + "'");
  return v;
}

int parse_integer(int line, const std::string& token) {
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE ||
      v < INT_MIN || v > INT_MAX)
    fail_line(line, "bad integer '" + token + "'");
  return (int)v;
}

std::vector<double> parse_list(int line, const std::string& value) {
  std::vector<double> out;
  if (trim(value).empty()) return out;
  std::istringstream in(value);
  std::string token;
  while (std::getline(in, token, ',')) out.push_back(parse_number(line, trim(token)));
  return out;
}

using KeyMap = std::map<std::string, KeyValue>;

void insert_unique(KeyMap& map, const std::string& key, const KeyValue& kv) {
  if (!map.emplace(key, kv).second) fail_line(kv.line, "duplicate key '" + kv.key + "'");
}

std::optional<KeyValue> take(KeyMap& map, const std::string& key) {
  auto it = map.find(key);
  if (it == map.end()) return std::nullopt;
  KeyValue kv = it->second;
  map.erase(it);
  return kv;
}

KeyValue require(KeyMap& map, const std::string& key) {
  std::optional<KeyValue> kv = take(map, key);
  if (!kv) fail("missing key '" + key + "'");
  return *kv;
}

ProfilePiece parse_eps_descriptor(const KeyValue& kv, const std::string& base_dir) {
  size_t colon = kv.value.find(':');
  if (colon == std::string::npos)
    fail_line(kv.line, "permittivity must be const:<v>, poly:<c0,c1,...>, or table:<path>");
  const std::string tag = kv.value.substr(0, colon);
  const std::string rest = trim(kv.value.substr(colon + 1));
  ProfilePiece piece;
  if (tag == "const") {
    piece.kind = PieceKind::Constant;
    piece.value = parse_number(kv.line, rest);
  } else if (tag == "poly") {
    piece.kind = PieceKind::Polynomial;
    piece.coeffs = parse_list(kv.line, rest);
    if (piece.coeffs.empty()) fail_line(kv.line, "poly needs at least one coefficient");
  } else if (tag == "table") {
    piece.kind = PieceKind::Table;
    if (rest.empty()) fail_line(kv.line, "table needs a file path");
    piece.table_path = rest;
    std::filesystem::path path(rest);
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    std::ifstream in(path);
    if (!in) fail("cannot open table file '" + rest + "'");
    std::vector<double> ys, vs;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::string s = trim(raw);
      if (s.empty()) continue;
      std::replace(s.begin(), s.end(), ',', ' ');
      std::istringstream row(s);
      std::string a, b, extra;
      if (!(row >> a >> b) || (row >> extra))
        fail("table file '" + rest + "' row " + std::to_string(line) +
             ": expected 'y,value'");
      ys.push_back(parse_number(kv.line, a));
      vs.push_back(parse_number(kv.line, b));
    }
    if (ys.size() < 2) fail("table file '" + rest + "' needs at least two rows");
    if (ys.size() > 600) fail("table file '" + rest + "' has too many rows");
    for (size_t j = 1; j < ys.size(); ++j)
      if (!(ys[j] > ys[j - 1]))
        fail("table file '" + rest + "' nodes must be strictly increasing");
    piece.table = barycentric_table(Eigen::Map<const RVector>(ys.data(), (Index)ys.size()));
    piece.table_values = Eigen::Map<const RVector>(vs.data(), (Index)vs.size());
  } else {
    fail_line(kv.line, "unknown permittivity kind '" + tag + "'");
  }
  return piece;
}

double sampled_min(const ProfilePiece& piece, double lo, double hi) {
  if (piece.kind == PieceKind::Constant) return piece.value;
  RVector ys = cheb_points(257, lo, hi);
  double m = piece.eval(ys(0));
  for (Index j = 1; j < ys.size(); ++j) m = std::min(m, piece.eval(ys(j)));
  return m;
}

std::string join_g17(const std::vector<double>& v, const char* sep) {
  std::string out;
  for (size_t j = 0; j < v.size(); ++j) {
    if (j) out += sep;
    out += format_g17(v[j]);
  }
  return out;
}

std::string eps_descriptor_text(const StratifiedProfile& p) {
  const ProfilePiece& piece = p.pieces.front();
  switch (piece.kind) {
    case PieceKind::Constant: return "const:" + format_g17(piece.value);
    case PieceKind::Polynomial: return "poly:" + join_g17(piece.coeffs, ",");
    case PieceKind::Table: return "table:" + piece.table_path;
  }
  return "";
}

// Background overlaid with one scatterer: background pieces outside
// [y0, y1], the scatterer's own profile inside.
StratifiedProfile overlay(const StratifiedProfile& bg, const Inhomogeneity& d) {
  StratifiedProfile out;
  size_t below = 0;
  while (below < bg.jumps.size() && bg.jumps[below] < d.y0) ++below;
  size_t above = below;
  while (above < bg.jumps.size() && bg.jumps[above] <= d.y1) ++above;
  for (size_t j = 0; j < below; ++j) {
    out.jumps.push_back(bg.jumps[j]);
    out.pieces.push_back(bg.pieces[j]);
  }
  out.pieces.push_back(bg.pieces[below]);
  out.jumps.push_back(d.y0);
  for (size_t j = 0; j < d.profile.jumps.size(); ++j) {
    out.pieces.push_back(d.profile.pieces[j]);
    out.jumps.push_back(d.profile.jumps[j]);
  }
  out.pieces.push_back(d.profile.pieces.back());
  out.jumps.push_back(d.y1);
  for (size_t j = above; j < bg.jumps.size(); ++j) {
    out.pieces.push_back(bg.pieces[j]);
    out.jumps.push_back(bg.jumps[j]);
  }
  out.pieces.push_back(bg.pieces.back());
  return canonicalized(std::move(out));
}

} // namespace

double ProfilePiece::eval(double y) const {
  switch (kind) {
    case PieceKind::Constant: return value;
    case PieceKind::Polynomial: {
      double v = 0.0;
      for (size_t j = coeffs.size(); j-- > 0;) v = v * y + coeffs[j];
      return v;
    }
    case PieceKind::Table: return barycentric_eval(table, table_values, y);
  }
  return 0.0;
}

const ProfilePiece& StratifiedProfile::piece_at(double y) const {
  size_t idx = std::upper_bound(jumps.begin(), jumps.end(), y) - jumps.begin();
  return pieces[idx];
}

double StratifiedProfile::eval(double y) const { return piece_at(y).eval(y); }

bool StratifiedProfile::is_constant() const {
  return pieces.size() == 1 && pieces.front().kind == PieceKind::Constant;
}

StratifiedProfile canonicalized(StratifiedProfile p) {
  StratifiedProfile out;
  out.pieces.push_back(std::move(p.pieces.front()));
  for (size_t j = 0; j < p.jumps.size(); ++j) {
    ProfilePiece& next = p.pieces[j + 1];
    const ProfilePiece& prev = out.pieces.back();
    if (prev.kind == PieceKind::Constant && next.kind == PieceKind::Constant &&
        prev.value == next.value)
      continue;
    out.jumps.push_back(p.jumps[j]);
    out.pieces.push_back(std::move(next));
  }
  return out;
}

Scene parse_scene(const std::string& config_text, const std::string& base_dir) {
  KeyMap flat;
  std::map<int, KeyMap> inh_keys;
  for (const KeyValue& kv : tokenize(config_text)) {
    if (kv.key.rfind("inhomogeneity[", 0) == 0) {
      size_t close = kv.key.find("].");
      if (close == std::string::npos) fail_line(kv.line, "malformed key '" + kv.key + "'");
      int index = parse_integer(kv.line, kv.key.substr(14, close - 14));
      if (index < 0 || index > 999) fail_line(kv.line, "inhomogeneity index out of range");
      insert_unique(inh_keys[index], kv.key.substr(close + 2), kv);
    } else {
      insert_unique(flat, kv.key, kv);
    }
  }

  Scene scene;

  std::optional<KeyValue> lambda_kv = take(flat, "lambda");
  std::optional<KeyValue> k0_kv = take(flat, "k0");
  if (lambda_kv.has_value() == k0_kv.has_value())
    fail("give exactly one of lambda or k0");
  if (k0_kv) {
    scene.k0_given = true;
    scene.k0 = parse_number(k0_kv->line, k0_kv->value);
    if (!(scene.k0 > 0.0)) fail("k0 must be positive");
  } else {
    scene.lambda = parse_number(lambda_kv->line, lambda_kv->value);
    if (!(scene.lambda > 0.0)) fail("lambda must be positive");
    scene.k0 = 2.0 * M_PI / scene.lambda;
  }

  {
    KeyValue ifc = require(flat, "background.interfaces");
    KeyValue bge = require(flat, "background.eps");
    std::vector<double> interfaces = parse_list(ifc.line, ifc.value);  // top to bottom
    std::vector<double> eps = parse_list(bge.line, bge.value);
    for (size_t j = 1; j < interfaces.size(); ++j)
      if (!(interfaces[j] < interfaces[j - 1]))
        fail("background interfaces must be strictly descending (top to bottom)");
    if (eps.size() != interfaces.size() + 1)
      fail("background.eps needs one more entry than background.interfaces");
    for (double e : eps)
      if (!(e > 0.0)) fail("background permittivity must be positive");
    scene.background.jumps.assign(interfaces.rbegin(), interfaces.rend());
    for (size_t j = eps.size(); j-- > 0;) {
      ProfilePiece piece;
      piece.kind = PieceKind::Constant;
      piece.value = eps[j];
      scene.background.pieces.push_back(std::move(piece));
    }
  }

  auto number = [&flat](const char* key) {
    KeyValue kv = require(flat, key);
    return parse_number(kv.line, kv.value);
  };
  auto integer = [&flat](const char* key) {
    KeyValue kv = require(flat, key);
    return parse_integer(kv.line, kv.value);
  };

  scene.pml.L1 = number("pml.L1");
  scene.pml.L2 = number("pml.L2");
  scene.pml.d1 = number("pml.d1");
  scene.pml.d2 = number("pml.d2");
  scene.pml.sigma = number("pml.sigma");
  scene.pml.m = integer("pml.m");
  if (!(scene.pml.sigma > 0.0)) fail("pml.sigma must be positive");
  scene.pml.x_profile();  // constructor validates lengths and grading
  scene.pml.y_profile();
  for (double yj : scene.background.jumps)
    if (!(std::abs(yj) < scene.pml.L2 / 2))
      fail("background interfaces must lie inside the physical box");

  std::optional<KeyValue> theta = take(flat, "incidence.plane.theta_deg");
  std::optional<KeyValue> src_x = take(flat, "incidence.source.x");
  std::optional<KeyValue> src_y = take(flat, "incidence.source.y");
  if (theta && (src_x || src_y)) fail("give exactly one incidence");
  if (theta) {
    scene.incidence.kind = Incidence::Kind::PlaneWave;
    scene.incidence.theta_deg = parse_number(theta->line, theta->value);
    if (!(scene.incidence.theta_deg > -90.0 && scene.incidence.theta_deg < 90.0))
      fail("incidence angle out of range (-90, 90)");
  } else if (src_x && src_y) {
    scene.incidence.kind = Incidence::Kind::LineSource;
    scene.incidence.xs = parse_number(src_x->line, src_x->value);
    scene.incidence.ys = parse_number(src_y->line, src_y->value);
  } else if (src_x || src_y) {
    fail(src_x ? "missing key 'incidence.source.y'" : "missing key 'incidence.source.x'");
  } else {
    fail("give exactly one incidence");
  }

  scene.num_modes = integer("nmm.N");
  if (scene.num_modes < 1) fail("nmm.N must be at least 1");
  if (std::optional<KeyValue> pps = take(flat, "nmm.points_per_subdomain")) {
    scene.points_per_subdomain = parse_integer(pps->line, pps->value);
    if (scene.points_per_subdomain < 4) fail("nmm.points_per_subdomain must be at least 4");
  }

  int expected = 0;
  for (auto& [index, keys] : inh_keys) {
    if (index != expected++) fail("inhomogeneity indices must be dense from 0");
    std::string ctx = "inhomogeneity[" + std::to_string(index) + "]";
    auto field = [&](const char* name) {
      auto it = keys.find(name);
      if (it == keys.end()) fail(ctx + ": missing " + name);
      KeyValue kv = it->second;
      keys.erase(it);
      return kv;
    };
    Inhomogeneity d;
    KeyValue xlo = field("x_lo"), xhi = field("x_hi");
    KeyValue ylo = field("y0"), yhi = field("y1");
    d.x_lo = parse_number(xlo.line, xlo.value);
    d.x_hi = parse_number(xhi.line, xhi.value);
    d.y0 = parse_number(ylo.line, ylo.value);
    d.y1 = parse_number(yhi.line, yhi.value);
    if (!(d.x_lo < d.x_hi)) fail(ctx + ": x-extent reversed");
    if (!(d.y0 < d.y1)) fail(ctx + ": y-extent reversed");
    ProfilePiece piece = parse_eps_descriptor(field("eps"), base_dir);
    if (piece.kind == PieceKind::Table) {
      if (piece.table.x(0) > d.y0 || piece.table.x(piece.table.x.size() - 1) < d.y1)
        fail(ctx + ": table does not cover [y0, y1]");
    }
    if (!(sampled_min(piece, d.y0, d.y1) > 0.0))
      fail(ctx + ": permittivity not positive on the interval");
    d.profile.pieces.push_back(std::move(piece));
    if (!keys.empty()) fail_line(keys.begin()->second.line,
                                 "unknown key '" + keys.begin()->second.key + "'");
    scene.inhomogeneities.push_back(std::move(d));
  }

  if (!flat.empty())
    fail_line(flat.begin()->second.line, "unknown key '" + flat.begin()->first + "'");

  std::sort(scene.inhomogeneities.begin(), scene.inhomogeneities.end(),
            [](const Inhomogeneity& a, const Inhomogeneity& b) { return a.x_lo < b.x_lo; });
  for (size_t j = 0; j + 1 < scene.inhomogeneities.size(); ++j) {
    const Inhomogeneity& a = scene.inhomogeneities[j];
    const Inhomogeneity& b = scene.inhomogeneities[j + 1];
    if (b.x_lo < a.x_hi) fail("overlapping inhomogeneities");
    if (b.x_lo == a.x_hi)
      fail("adjacent inhomogeneities share a boundary; merge them into one");
  }
  for (size_t j = 0; j < scene.inhomogeneities.size(); ++j) {
    const Inhomogeneity& d = scene.inhomogeneities[j];
    std::string ctx = "inhomogeneity[" + std::to_string(j) + "]";
    if (!(d.x_lo > -scene.pml.L1 / 2 && d.x_hi < scene.pml.L1 / 2))
      fail(ctx + ": exceeds the physical box in x");
    if (!(d.y0 > -scene.pml.L2 / 2 && d.y1 < scene.pml.L2 / 2))
      fail(ctx + ": exceeds the physical box in y");
  }

  if (scene.incidence.kind == Incidence::Kind::LineSource) {
    const double xs = scene.incidence.xs, ys = scene.incidence.ys;
    if (!(std::abs(xs) < scene.pml.L1 / 2 && std::abs(ys) < scene.pml.L2 / 2))
      fail("source outside the physical box");
    for (const Inhomogeneity& d : scene.inhomogeneities) {
      if (xs == d.x_lo || xs == d.x_hi) fail("source on segment boundary");
      bool x_in = xs > d.x_lo && xs < d.x_hi;
      bool y_in = ys > d.y0 && ys < d.y1;
      bool x_closed = xs >= d.x_lo && xs <= d.x_hi;
      bool y_closed = ys >= d.y0 && ys <= d.y1;
      if (x_closed && y_closed && !(x_in && y_in))
        fail("source on inhomogeneity boundary");
    }
  }

  return scene;
}

std::string serialize_scene(const Scene& scene) {
  std::ostringstream out;
  if (scene.k0_given)
    out << "k0 = " << format_g17(scene.k0) << "\n";
  else
    out << "lambda = " << format_g17(scene.lambda) << "\n";
  out << "background.interfaces =";
  for (size_t j = scene.background.jumps.size(); j-- > 0;)
    out << (j + 1 == scene.background.jumps.size() ? " " : ", ")
        << format_g17(scene.background.jumps[j]);
  out << "\n";
  out << "background.eps =";
  for (size_t j = scene.background.pieces.size(); j-- > 0;)
    out << (j + 1 == scene.background.pieces.size() ? " " : ", ")
        << format_g17(scene.background.pieces[j].value);
  out << "\n";
  for (size_t j = 0; j < scene.inhomogeneities.size(); ++j) {
    const Inhomogeneity& d = scene.inhomogeneities[j];
    std::string prefix = "inhomogeneity[" + std::to_string(j) + "].";
    out << prefix << "x_lo = " << format_g17(d.x_lo) << "\n";
    out << prefix << "x_hi = " << format_g17(d.x_hi) << "\n";
    out << prefix << "y0 = " << format_g17(d.y0) << "\n";
    out << prefix << "y1 = " << format_g17(d.y1) << "\n";
    out << prefix << "eps = " << eps_descriptor_text(d.profile) << "\n";
  }
  out << "pml.L1 = " << format_g17(scene.pml.L1) << "\n";
  out << "pml.L2 = " << format_g17(scene.pml.L2) << "\n";
  out << "pml.d1 = " << format_g17(scene.pml.d1) << "\n";
  out << "pml.d2 = " << format_g17(scene.pml.d2) << "\n";
  out << "pml.sigma = " << format_g17(scene.pml.sigma) << "\n";
  out << "pml.m = " << scene.pml.m << "\n";
  if (scene.incidence.kind == Incidence::Kind::PlaneWave) {
    out << "incidence.plane.theta_deg = " << format_g17(scene.incidence.theta_deg) << "\n";
  } else {
    out << "incidence.source.x = " << format_g17(scene.incidence.xs) << "\n";
    out << "incidence.source.y = " << format_g17(scene.incidence.ys) << "\n";
  }
  out << "nmm.N = " << scene.num_modes << "\n";
  out << "nmm.points_per_subdomain = " << scene.points_per_subdomain << "\n";
  return out.str();
}

double permittivity(const Scene& scene, double x, double y) {
  for (const Inhomogeneity& d : scene.inhomogeneities)
    if (x >= d.x_lo && x < d.x_hi && y >= d.y0 && y < d.y1) return d.profile.eval(y);
  return scene.background.eval(y);
}

std::vector<Segment> segment_decomposition(const Scene& scene) {
  const double x_out = scene.pml.L1 / 2 + scene.pml.d1;
  std::vector<Segment> out;
  if (scene.inhomogeneities.empty()) {
    out.push_back({-x_out, x_out, SegmentKind::Exterior, scene.background});
    return out;
  }
  out.push_back({-x_out, scene.inhomogeneities.front().x_lo, SegmentKind::Exterior,
                 scene.background});
  for (size_t j = 0; j < scene.inhomogeneities.size(); ++j) {
    const Inhomogeneity& d = scene.inhomogeneities[j];
    out.push_back({d.x_lo, d.x_hi, SegmentKind::Interior, overlay(scene.background, d)});
    if (j + 1 < scene.inhomogeneities.size())
      out.push_back({d.x_hi, scene.inhomogeneities[j + 1].x_lo, SegmentKind::Interior,
                     scene.background});
  }
  out.push_back({scene.inhomogeneities.back().x_hi, x_out, SegmentKind::Exterior,
                 scene.background});
  return out;
}

double plane_alpha(const Scene& scene) {
  if (scene.incidence.kind != Incidence::Kind::PlaneWave)
    throw std::logic_error("scene: not a plane-wave scene");
  double th = scene.incidence.theta_deg * M_PI / 180.0;
  return scene.k0 * std::sqrt(scene.eps_top()) * std::sin(th);
}

double plane_beta_plus(const Scene& scene) {
  if (scene.incidence.kind != Incidence::Kind::PlaneWave)
    throw std::logic_error("scene: not a plane-wave scene");
  double th = scene.incidence.theta_deg * M_PI / 180.0;
  return scene.k0 * std::sqrt(scene.eps_top()) * std::cos(th);
}

Complex plane_beta_minus(const Scene& scene) {
  double a = plane_alpha(scene);
  double w = scene.k0 * scene.k0 * scene.eps_bottom() - a * a;
  return principal_sqrt(Complex(w, 0.0));
}

} // namespace nmm
