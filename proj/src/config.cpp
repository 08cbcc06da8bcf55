#include "neass/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace neass {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(s)};
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<cplx> parse_complex(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.back() != 'i') {
    const auto re = parse_real(text);
    if (!re) return std::nullopt;
    return cplx(*re, 0.0);
  }
  std::string_view body = text.substr(0, text.size() - 1);
  // split at the last sign that is not the leading one and not an exponent sign
  std::size_t cut = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_of = [](std::string_view s) -> std::optional<double> {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s);
  };
  if (cut == std::string_view::npos) {
    const auto im = imag_of(body);
    if (!im) return std::nullopt;
    return cplx(0.0, *im);
  }
  const auto re = parse_real(body.substr(0, cut));
  const auto im = imag_of(body.substr(cut));
  if (!re || !im) return std::nullopt;
  return cplx(*re, *im);
}

std::optional<Matrix> parse_matrix(std::string_view text) {
  const auto rows = split(text, ';');
  std::vector<std::vector<cplx>> values;
  for (auto row : rows) {
    std::vector<cplx> r;
    for (auto cell : split(row, ',')) {
      const auto v = parse_complex(cell);
      if (!v) return std::nullopt;
      r.push_back(*v);
    }
    if (!values.empty() && r.size() != values.front().size()) return std::nullopt;
    values.push_back(std::move(r));
  }
  Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.front().size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  return m;
}

const ConfigEntry* ConfigSection::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') cfg.fail(line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) cfg.fail(line_no, "empty section name");
      for (const auto& s : cfg.sections_)
        if (s.name == name) cfg.fail(line_no, "duplicate section [" + std::string(name) + "]");
      cfg.sections_.push_back({std::string(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) cfg.fail(line_no, "expected 'key = value'");
    if (cfg.sections_.empty()) cfg.fail(line_no, "entry outside of any section");
    auto words = split_ws(line.substr(0, eq));
    if (words.empty()) cfg.fail(line_no, "missing key");
    ConfigEntry e;
    e.key = words.front();
    e.args.assign(words.begin() + 1, words.end());
    e.value = std::string(trim(line.substr(eq + 1)));
    e.line = line_no;
    if (e.value.empty()) cfg.fail(line_no, "missing value for '" + e.key + "'");
    cfg.sections_.back().entries.push_back(std::move(e));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, path + ": cannot open");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

const ConfigSection* Config::section(std::string_view name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const ConfigSection*> Config::sections_with_prefix(std::string_view prefix) const {
  std::vector<const ConfigSection*> out;
  for (const auto& s : sections_)
    if (s.name.size() > prefix.size() && s.name.compare(0, prefix.size(), prefix) == 0) out.push_back(&s);
  return out;
}

std::string Config::canonical() const {
  std::ostringstream out;
  for (const auto& s : sections_) {
    out << '[' << s.name << "]\n";
    for (const auto& e : s.entries) {
      out << e.key;
      for (const auto& a : e.args) out << ' ' << a;
      out << '=';
      for (char c : e.value)
        if (!std::isspace(static_cast<unsigned char>(c))) out << c;
      out << '\n';
    }
  }
  return out.str();
}

void Config::fail(int line, const std::string& message) const {
  throw Error(ErrorCode::ConfigError, source_ + ":" + std::to_string(line) + ": " + message);
}

double Config::to_double(const ConfigEntry& e, std::string_view text) const {
  const auto v = parse_real(text);
  if (!v) fail(e.line, "'" + e.key + "': expected a number, got '" + std::string(text) + "'");
  return *v;
}

int Config::to_int(const ConfigEntry& e, std::string_view text) const {
  text = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(e.line, "'" + e.key + "': expected an integer, got '" + std::string(text) + "'");
  return v;
}

std::vector<double> Config::to_doubles(const ConfigEntry& e) const {
  std::vector<double> out;
  for (auto part : split(e.value, ',')) out.push_back(to_double(e, part));
  return out;
}

Matrix Config::to_matrix(const ConfigEntry& e) const {
  const auto m = parse_matrix(e.value);
  if (!m) fail(e.line, "'" + e.key + "': malformed matrix literal '" + e.value + "'");
  return *m;
}

Switching Config::to_switching(const ConfigEntry& e) const {
  const auto w = split_ws(e.value);
  auto num = [&](std::size_t i) { return to_double(e, w.at(i)); };
  auto need = [&](std::size_t n) {
    if (w.size() != n) fail(e.line, "'" + w[0] + "' takes " + std::to_string(n - 1) + " parameters");
  };
  if (w.empty()) fail(e.line, "empty switching");
  if (w[0] == "constant") {
    need(2);
    return switching::Constant{num(1)};
  }
  if (w[0] == "ramp") {
    need(5);
    if (!(num(2) > num(1))) fail(e.line, "ramp needs end > start");
    return switching::Ramp{num(1), num(2), num(3), num(4)};
  }
  if (w[0] == "linear") {
    need(3);
    return switching::Linear{num(1), num(2)};
  }
  if (w[0] == "sine") {
    need(4);
    return switching::Sine{num(1), num(2), num(3)};
  }
  fail(e.line, "unknown switching '" + w[0] + "' (constant, ramp, linear, sine)");
}

namespace {

const ConfigEntry* find(const Config& c, std::string_view section, std::string_view key) {
  const auto* s = c.section(section);
  return s ? s->find(key) : nullptr;
}

}  // namespace

double Config::get_double(std::string_view section, std::string_view key, double fallback) const {
  const auto* e = find(*this, section, key);
  return e ? to_double(*e, e->value) : fallback;
}

int Config::get_int(std::string_view section, std::string_view key, int fallback) const {
  const auto* e = find(*this, section, key);
  return e ? to_int(*e, e->value) : fallback;
}

std::string Config::get_string(std::string_view section, std::string_view key, std::string fallback) const {
  const auto* e = find(*this, section, key);
  return e ? e->value : fallback;
}

std::vector<double> Config::get_doubles(std::string_view section, std::string_view key,
                                        std::vector<double> fallback) const {
  const auto* e = find(*this, section, key);
  return e ? to_doubles(*e) : fallback;
}

std::vector<int> Config::get_ints(std::string_view section, std::string_view key, std::vector<int> fallback) const {
  const auto* e = find(*this, section, key);
  if (!e) return fallback;
  std::vector<int> out;
  for (auto part : split(e->value, ',')) out.push_back(to_int(*e, part));
  return out;
}

namespace {

Site site_from_args(const Config& c, const ConfigEntry& e, std::size_t first, int dimension) {
  if (e.args.size() != first + static_cast<std::size_t>(dimension))
    c.fail(e.line, "'" + e.key + "' needs " + std::to_string(dimension) + " coordinate(s)");
  Site s{0, 0};
  for (int d = 0; d < dimension; ++d) s[static_cast<std::size_t>(d)] = c.to_int(e, e.args[first + static_cast<std::size_t>(d)]);
  return s;
}

void check_shape(const Config& c, const ConfigEntry& e, const Matrix& m, int orbitals) {
  if (m.rows() != orbitals || m.cols() != orbitals)
    c.fail(e.line, "'" + e.key + "' must be " + std::to_string(orbitals) + "x" + std::to_string(orbitals));
}

ModelParams read_model(const Config& c, const ConfigSection& s, int dimension, int orbitals) {
  ModelParams p;
  p.orbitals = orbitals;
  for (const auto& e : s.entries) {
    if (e.key == "hopping") {
      const Matrix m = c.to_matrix(e);
      check_shape(c, e, m, orbitals);
      p.hopping[site_from_args(c, e, 0, dimension)] = m;
    } else if (e.key == "onsite") {
      p.onsite_uniform = c.to_matrix(e);
      check_shape(c, e, p.onsite_uniform, orbitals);
    } else if (e.key == "onsite.staggered") {
      p.onsite_staggered = c.to_matrix(e);
      check_shape(c, e, p.onsite_staggered, orbitals);
    } else if (e.key == "onsite.site") {
      const Matrix m = c.to_matrix(e);
      check_shape(c, e, m, orbitals);
      p.onsite_site[site_from_args(c, e, 0, dimension)] = m;
    } else if (e.key == "density") {
      if (e.args.size() != 1) c.fail(e.line, "'density' takes one distance argument");
      const Matrix m = c.to_matrix(e);
      check_shape(c, e, m, orbitals);
      p.density[c.to_int(e, e.args[0])] = m;
    } else if (e.key == "chemical_potential") {
      p.mu = c.to_double(e, e.value);
    } else if (e.key == "switching") {
      continue;
    } else {
      c.fail(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
    }
  }
  try {
    p.complete_hopping();
  } catch (const Error& err) {
    c.fail(s.line, err.what());
  }
  return p;
}

void check_keys(const Config& c, const ConfigSection& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& e : s.entries)
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
      c.fail(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
}

}  // namespace

ExperimentSetup load_setup(const Config& c) {
  ExperimentSetup out;
  out.canonical_config = c.canonical();

  const auto* lat = c.section("lattice");
  if (!lat) c.fail(0, "missing [lattice] section");
  check_keys(c, *lat, {"dimension", "radius", "boundary", "orbitals"});
  out.family.dimension = c.get_int("lattice", "dimension", 1);
  if (out.family.dimension != 1 && out.family.dimension != 2)
    c.fail(lat->find("dimension")->line, "dimension must be 1 or 2");
  out.radius = c.get_int("lattice", "radius", 1);
  out.family.orbitals = c.get_int("lattice", "orbitals", 1);
  try {
    out.family.boundary = parse_boundary(c.get_string("lattice", "boundary", "torus"));
  } catch (const Error&) {
    c.fail(lat->find("boundary")->line, "boundary must be 'open' or 'torus'");
  }

  const auto* h0 = c.section("h0");
  if (!h0) c.fail(0, "missing [h0] section");
  out.family.params = read_model(c, *h0, out.family.dimension, out.family.orbitals);
  for (const auto* drive : c.sections_with_prefix("h0.")) {
    const auto* sw = drive->find("switching");
    if (!sw) c.fail(drive->line, "[" + drive->name + "] needs a 'switching' entry");
    out.family.drives.emplace_back(c.to_switching(*sw),
                                   read_model(c, *drive, out.family.dimension, out.family.orbitals));
  }

  if (const auto* pert = c.section("perturbation")) {
    check_keys(c, *pert, {"potential", "switching"});
    if (const auto* e = pert->find("potential")) {
      const auto w = split_ws(e->value);
      if (w.size() != 2 || (w[0] != "linear" && w[0] != "sine"))
        c.fail(e->line, "potential must be 'linear <slope>' or 'sine <amplitude>'");
      out.perturbation.kind = w[0];
      out.perturbation.strength = c.to_double(*e, w[1]);
    }
    if (const auto* e = pert->find("switching")) out.perturbation.profile = c.to_switching(*e);
  }

  if (const auto* obs = c.section("observables")) {
    for (const auto& e : obs->entries) {
      ObservableSpec o;
      o.name = e.key;
      const auto w = split_ws(e.value);
      if (w.empty()) c.fail(e.line, "empty observable");
      o.kind = w[0];
      std::size_t nsites = 0;
      if (o.kind == "density") nsites = 1;
      else if (o.kind == "current" || o.kind == "hopping") nsites = 2;
      else c.fail(e.line, "observable kind must be density, current or hopping");
      const std::size_t d = static_cast<std::size_t>(out.family.dimension);
      if (w.size() != 1 + nsites * d && w.size() != 2 + nsites * d)
        c.fail(e.line, "'" + o.kind + "' needs " + std::to_string(nsites * d) + " coordinates and an optional orbital");
      for (std::size_t i = 0; i < nsites; ++i) {
        Site s{0, 0};
        for (std::size_t k = 0; k < d; ++k) s[k] = c.to_int(e, w[1 + i * d + k]);
        o.sites.push_back(s);
      }
      if (w.size() == 2 + nsites * d) o.orbital = c.to_int(e, w.back());
      if (o.orbital < 0 || o.orbital >= out.family.orbitals) c.fail(e.line, "orbital out of range");
      out.observables.push_back(std::move(o));
    }
  }

  auto& p = out.params;
  if (const auto* ex = c.section("experiment")) {
    check_keys(c, *ex, {"order", "eps", "eta", "t0", "t", "propagation_tolerance", "max_steps", "dt", "s_grid",
                        "s_fit", "k_list", "t_grid", "gap_threshold", "min_k", "interior_l", "norm_a", "norm_n",
                        "m_list", "axis", "delta", "regime_factor"});
    p.orders = c.get_ints("experiment", "order", p.orders);
    p.eps = c.get_doubles("experiment", "eps", p.eps);
    p.eta = c.get_doubles("experiment", "eta", p.eta);
    p.t0 = c.get_double("experiment", "t0", p.t0);
    p.t = c.get_double("experiment", "t", p.t);
    p.propagation_tolerance = c.get_double("experiment", "propagation_tolerance", p.propagation_tolerance);
    p.max_steps = static_cast<std::size_t>(c.get_int("experiment", "max_steps", static_cast<int>(p.max_steps)));
    p.dt = c.get_double("experiment", "dt", p.dt);
    p.s_grid = c.get_doubles("experiment", "s_grid", p.s_grid);
    p.s_fit = c.get_double("experiment", "s_fit", p.s_grid.empty() ? p.s_fit : p.s_grid.back());
    p.k_list = c.get_ints("experiment", "k_list", p.k_list);
    p.t_grid = c.get_doubles("experiment", "t_grid", p.t_grid);
    p.gap_threshold = c.get_double("experiment", "gap_threshold", p.gap_threshold);
    p.min_k = c.get_int("experiment", "min_k", p.min_k);
    p.interior_l = c.get_int("experiment", "interior_l", p.interior_l);
    p.norm_a = c.get_double("experiment", "norm_a", p.norm_a);
    p.norm_n = c.get_int("experiment", "norm_n", p.norm_n);
    p.m_list = c.get_ints("experiment", "m_list", p.m_list);
    p.axis = c.get_string("experiment", "axis", p.axis);
    p.delta = c.get_doubles("experiment", "delta", p.delta);
    p.regime_factor = c.get_double("experiment", "regime_factor", p.regime_factor);
    for (int n : p.orders)
      if (n < 1 || n > 8) c.fail(ex->find("order")->line, "order must be in 1..8");
    for (double x : p.eps)
      if (!(x > 0.0)) c.fail(ex->find("eps")->line, "eps values must be positive");
    for (double x : p.eta)
      if (!(x > 0.0)) c.fail(ex->find("eta")->line, "eta values must be positive");
    if (p.axis != "auto" && p.axis != "eps" && p.axis != "eta")
      c.fail(ex->find("axis")->line, "axis must be auto, eps or eta");
  }
  if (p.k_list.empty()) p.k_list = {out.radius};
  return out;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace neass
