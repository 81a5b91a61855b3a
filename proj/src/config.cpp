#include "layerlab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace layerlab {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
          c == '_' || c == '-'))
      return false;
  return true;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: missing '=' on line " +
                                  std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key))
      throw std::invalid_argument("config: bad key '" + key + "' on line " +
                                  std::to_string(lineno));
    c.entries_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string Config::hash() const {
  const std::string s = serialize();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

const std::string& Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw std::invalid_argument("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key,
                           const std::string& dflt) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (trim(v.substr(pos)).size())
    throw std::invalid_argument("config: bad number for '" + key + "'");
  return x;
}

double Config::get_double_or(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

int Config::get_int_or(const std::string& key, int dflt) const {
  return has(key) ? int(std::llround(get_double(key))) : dflt;
}

std::vector<double> Config::get_list(const std::string& key) const {
  const std::string& v = get(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty())
    throw std::invalid_argument("config: empty list for '" + key + "'");
  return out;
}

std::vector<double> Config::get_list_or(const std::string& key,
                                        std::vector<double> dflt) const {
  return has(key) ? get_list(key) : dflt;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw std::invalid_argument("config: bad key");
  entries_[key] = value;
}

PotentialSpec potential_from_config(const Config& c) {
  const std::string kind = c.get_or("potential.kind", "quartic");
  if (kind != "quartic")
    throw std::invalid_argument("potential.kind: only 'quartic' is built in");
  return PotentialSpec::quartic(c.get_double_or("potential.a", -1.0),
                                c.get_double_or("potential.b", 1.0),
                                c.get_double_or("potential.lambda", 1.0));
}

BoundaryGeometry geometry_from_config(const Config& c) {
  const std::string kind = c.get_or("geometry.kind", "disk");
  if (kind == "disk" || kind == "circle")
    return BoundaryGeometry::circle(c.get_double_or("geometry.radius", 1.0));
  if (kind == "ellipse")
    return BoundaryGeometry::ellipse(c.get_double_or("geometry.p", 2.0),
                                     c.get_double_or("geometry.q", 1.0));
  throw std::invalid_argument("geometry.kind: disk or ellipse");
}

DirichletData data_from_config(const Config& c) {
  const std::string kind = c.get_or("data.kind", "constant");
  if (kind == "constant")
    return DirichletData::constant(c.get_double_or("data.value", 0.2));
  if (kind == "cosine")
    return DirichletData::cosine(c.get_double_or("data.base", 0.2),
                                 c.get_double_or("data.amplitude", 0.05));
  throw std::invalid_argument("data.kind: constant or cosine");
}

EpsilonLadder ladder_from_config(const Config& c, bool two_d) {
  EpsilonLadder l;
  l.eps = c.get_list_or("ladder.eps", two_d ? EpsilonLadder::standard_2d().eps
                                            : EpsilonLadder::standard_1d().eps);
  return l;
}

DeltaSchedule schedule_from_config(const Config& c) {
  const std::string kind = c.get_or("schedule.kind", "power");
  const double m = c.get_double_or("schedule.m", 2.0);
  if (kind == "power") return DeltaSchedule::power(m);
  if (kind == "log") return DeltaSchedule::log(m);
  if (kind == "linear") return DeltaSchedule::linear();
  throw std::invalid_argument("schedule.kind: power, log, or linear");
}

GridSpec1D grid1d_from_config(const Config& c) {
  GridSpec1D gs;
  gs.nodes_per_eps = c.get_int_or("grid1d.nodes_per_eps", gs.nodes_per_eps);
  gs.layer_widths = c.get_double_or("grid1d.layer_widths", gs.layer_widths);
  gs.growth = c.get_double_or("grid1d.growth", gs.growth);
  gs.h_max_frac = c.get_double_or("grid1d.h_max_frac", gs.h_max_frac);
  return gs;
}

GridSpec2D grid2d_from_config(const Config& c) {
  GridSpec2D gs;
  gs.n_theta = c.get_int_or("grid2d.n_theta", gs.n_theta);
  gs.h0_over_eps = c.get_double_or("grid2d.h0_over_eps", gs.h0_over_eps);
  gs.growth = c.get_double_or("grid2d.growth", gs.growth);
  gs.h_max = c.get_double_or("grid2d.h_max", gs.h_max);
  return gs;
}

void write_csv(const std::string& path, const std::string& config_hash,
               const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "# config_hash=" << config_hash << "\n" << header << "\n";
  f.precision(12);
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << "\n";
  }
}

void write_grid_dump(const std::string& path, const std::string& config_hash,
                     const Field2D& field) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "# config_hash=" << config_hash << "\n";
  if (field.geom.kind() == BoundaryGeometry::Kind::Circle)
    f << "geometry disk " << field.geom.radius() << "\n";
  else
    f << "geometry ellipse " << field.geom.semi_axis_p() << " "
      << field.geom.semi_axis_q() << "\n";
  f << "eps " << field.eps << "\n";
  f << "nr " << field.nr() << " ntheta " << field.nt() << "\n";
  f.precision(13);
  f << "rho";
  for (double r : field.rho) f << " " << r;
  f << "\ntheta";
  for (double t : field.theta) f << " " << t;
  f << "\n";
  for (int i = 0; i < field.nr(); ++i) {
    for (int j = 0; j < field.nt(); ++j) f << (j ? " " : "") << field.at(i, j);
    f << "\n";
  }
}

}  // namespace layerlab
