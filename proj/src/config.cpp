#include "pfgeo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace pfgeo {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

// Throws std::invalid_argument with a short message.
double to_double(const std::string& s) {
  std::string t = trim(s);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* b = t.data();
  if (!t.empty() && t[0] == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("expected a number, got '" + t + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  std::string t = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("expected an integer, got '" + t + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

std::string check_expr(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    throw std::invalid_argument(std::string("expression: ") + e.what());
  }
  return text;
}

// "<prefix><digits><suffix>" -> digits, or -1.
int indexed_key(const std::string& key, const std::string& prefix, const std::string& suffix = "") {
  if (key.size() <= prefix.size() + suffix.size()) return -1;
  if (key.compare(0, prefix.size(), prefix) != 0) return -1;
  if (key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) return -1;
  std::string mid = key.substr(prefix.size(), key.size() - prefix.size() - suffix.size());
  if (mid.empty() || !std::all_of(mid.begin(), mid.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return -1;
  }
  return std::stoi(mid);
}

}  // namespace

SeedSpec parse_seed(const std::string& text) {
  static const std::set<std::string> allowed{"x", "y", "p", "q", "iso", "alpha"};
  SeedSpec s;
  for (const auto& part : split(text, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("seed entry '" + part + "' is not k=v");
    std::string k = trim(part.substr(0, eq));
    if (!allowed.count(k)) throw std::invalid_argument("unknown seed key '" + k + "'");
    s[k] = to_double(part.substr(eq + 1));
  }
  if (s.empty()) throw std::invalid_argument("empty seed");
  return s;
}

ScenarioConfig parse_config(std::istream& in, const std::string& source) {
  ScenarioConfig cfg;
  std::map<int, std::string> coeffs, fs;
  std::map<std::string, int> seen;
  int n_line = 0, line_no = 0;
  bool have_n = false;
  std::string mode = "coefficients";

  IntegratorConfig& ic = cfg.integrator;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"name", [&](const std::string& v) { cfg.name = v; }},
      {"mode", [&](const std::string& v) {
         if (v != "coefficients" && v != "berwald-moor") {
           throw std::invalid_argument("mode must be coefficients or berwald-moor");
         }
         mode = v;
       }},
      {"n", [&](const std::string& v) { cfg.n = to_int(v); have_n = true; n_line = line_no; }},
      {"xmin", [&](const std::string& v) { cfg.domain.xmin = to_double(v); }},
      {"xmax", [&](const std::string& v) { cfg.domain.xmax = to_double(v); }},
      {"ymin", [&](const std::string& v) { cfg.domain.ymin = to_double(v); }},
      {"ymax", [&](const std::string& v) { cfg.domain.ymax = to_double(v); }},
      {"resolution", [&](const std::string& v) { cfg.resolution = to_int(v); }},
      {"seed", [&](const std::string& v) { cfg.seeds.push_back(parse_seed(v)); }},
      {"alphas", [&](const std::string& v) { cfg.alphas = to_list(v); }},
      {"family", [&](const std::string& v) {
         auto l = to_list(v);
         if (l.size() != 3) throw std::invalid_argument("family needs x, y, p0");
         cfg.family = std::array<double, 3>{l[0], l[1], l[2]};
       }},
      {"bm_y0", [&](const std::string& v) { cfg.bm_y0 = to_double(v); }},
      {"adapted_a", [&](const std::string& v) { cfg.adapted_a = check_expr(v); }},
      {"adapted_b", [&](const std::string& v) { cfg.adapted_b = check_expr(v); }},
      {"initial_step", [&](const std::string& v) { ic.initial_step = to_double(v); }},
      {"max_step", [&](const std::string& v) { ic.max_step = to_double(v); }},
      {"rtol", [&](const std::string& v) { ic.rtol = to_double(v); }},
      {"atol", [&](const std::string& v) { ic.atol = to_double(v); }},
      {"max_steps", [&](const std::string& v) { ic.max_steps = to_int(v); }},
      {"chart_threshold", [&](const std::string& v) { ic.chart_threshold = to_double(v); }},
      {"event_tol", [&](const std::string& v) { ic.event_tol = to_double(v); }},
      {"isotropy_tol", [&](const std::string& v) { ic.isotropy_tol = to_double(v); }},
      {"sample_spacing", [&](const std::string& v) { ic.sample_spacing = to_double(v); }},
      {"max_length", [&](const std::string& v) { ic.max_length = to_double(v); }},
      {"bidirectional", [&](const std::string& v) { ic.bidirectional = to_bool(v); }},
      {"puiseux_s", [&](const std::string& v) { cfg.puiseux_s = to_int(v); }},
      {"puiseux_seed", [&](const std::string& v) { cfg.puiseux_seed = to_list(v); }},
      {"puiseux_order", [&](const std::string& v) { cfg.puiseux_order = to_int(v); }},
      {"puiseux_free", [&](const std::string& v) {
         for (const auto& part : split(v, ',')) {
           auto eq = part.find('=');
           if (eq == std::string::npos) throw std::invalid_argument("puiseux_free entries are order=value");
           cfg.puiseux_free[to_int(part.substr(0, eq))] = to_double(part.substr(eq + 1));
         }
       }},
      {"verify_samples", [&](const std::string& v) { cfg.verify_samples = to_int(v); }},
      {"rng_seed", [&](const std::string& v) { cfg.rng_seed = static_cast<unsigned>(to_int(v)); }},
      {"out", [&](const std::string& v) { cfg.out_dir = v; }},
  };

  std::string raw;
  int last_line = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    last_line = line_no;
    std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected key = value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "missing key");
    if (value.empty()) throw ConfigError(source, line_no, "missing value for '" + key + "'");
    if (key != "seed" && seen.count(key)) {
      throw ConfigError(source, line_no,
                        "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;
    try {
      if (auto it = setters.find(key); it != setters.end()) {
        it->second(value);
      } else if (int i = indexed_key(key, "a"); i >= 0) {
        coeffs[i] = check_expr(value);
      } else if (int k = indexed_key(key, "f"); k >= 1) {
        fs[k] = check_expr(value);
      } else if (int gx = indexed_key(key, "adapted_g", "x"); gx >= 0) {
        cfg.adapted_g[gx].first = check_expr(value);
      } else if (int gy = indexed_key(key, "adapted_g", "y"); gy >= 0) {
        cfg.adapted_g[gy].second = check_expr(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line_no, e.what());
    }
  }

  auto line_of = [&](const std::string& key) { return seen.count(key) ? seen[key] : last_line; };
  if (!coeffs.empty() && !fs.empty()) {
    throw ConfigError(source, line_of("f1"), "both coefficients (a*) and an immersion (f*) are given");
  }
  if (mode == "berwald-moor") {
    cfg.mode = ScenarioMode::BerwaldMoor;
    if (fs.empty()) throw ConfigError(source, line_of("mode"), "berwald-moor mode needs f1..fn");
    int count = fs.rbegin()->first;
    if (static_cast<int>(fs.size()) != count) {
      throw ConfigError(source, line_of("mode"), "immersion components must be f1..f" + std::to_string(count));
    }
    if (have_n && cfg.n != count) {
      throw ConfigError(source, n_line, "n = " + std::to_string(cfg.n) + " but " +
                                            std::to_string(count) + " components are given");
    }
    cfg.n = count;
    if (cfg.n < 3) throw ConfigError(source, line_of("f1"), "an immersion needs at least f1, f2, f3");
    for (auto& [k, v] : fs) cfg.immersion.push_back(v);
    if (cfg.adapted_a.has_value() != cfg.adapted_b.has_value()) {
      throw ConfigError(source, line_of(cfg.adapted_a ? "adapted_a" : "adapted_b"),
                        "adapted_a and adapted_b go together");
    }
    for (auto& [k, g] : cfg.adapted_g) {
      if (g.first.empty() || g.second.empty()) {
        throw ConfigError(source, last_line,
                          "adapted_g" + std::to_string(k) + " needs both x and y parts");
      }
    }
  } else {
    if (coeffs.empty()) throw ConfigError(source, last_line, "no coefficients a0..an given");
    if (!have_n) throw ConfigError(source, last_line, "n is required");
    if (!cfg.adapted_g.empty() || cfg.adapted_a) {
      throw ConfigError(source, line_of("adapted_a"), "adapted keys need mode = berwald-moor");
    }
    if (cfg.n < 2) throw ConfigError(source, n_line, "n must be at least 2");
    if (coeffs.rbegin()->first > cfg.n) {
      throw ConfigError(source, line_of("a" + std::to_string(coeffs.rbegin()->first)),
                        "coefficient index exceeds n");
    }
    cfg.coeffs.assign(cfg.n + 1, "0");
    for (auto& [i, v] : coeffs) cfg.coeffs[i] = v;
  }
  const Box& b = cfg.domain;
  if (!(b.xmin < b.xmax) || !(b.ymin < b.ymax)) {
    throw ConfigError(source, line_of("xmin"), "domain box is empty");
  }
  if (cfg.resolution < 4) throw ConfigError(source, line_of("resolution"), "resolution below 4");
  try {
    cfg.metric();
  } catch (const std::exception& e) {
    throw ConfigError(source, last_line, std::string("metric: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse_config(in, path);
}

PseudoFinslerMetric ScenarioConfig::metric() const {
  if (mode == ScenarioMode::BerwaldMoor) return induced_metric(*surface());
  return PseudoFinslerMetric::parse(n, coeffs);
}

std::optional<SurfaceImmersion> ScenarioConfig::surface() const {
  if (mode != ScenarioMode::BerwaldMoor) return std::nullopt;
  SurfaceImmersion imm;
  for (const auto& f : immersion) imm.f.push_back(ScalarField::parse(f));
  return imm;
}

std::optional<AdaptedLocalMetric> ScenarioConfig::adapted(std::string* why) const {
  if (mode != ScenarioMode::BerwaldMoor) {
    if (why) *why = "not a berwald-moor scenario";
    return std::nullopt;
  }
  if (adapted_a) {
    std::vector<std::pair<ScalarField, ScalarField>> g;
    for (const auto& [k, v] : adapted_g) g.emplace_back(ScalarField::parse(v.first), ScalarField::parse(v.second));
    return AdaptedLocalMetric(ScalarField::parse(*adapted_a), ScalarField::parse(*adapted_b), std::move(g));
  }
  return adapted_from_immersion(*surface(), domain, why);
}

}  // namespace pfgeo
