#include <cmath>
#include <fstream>
#include <sstream>

#include "usol/harness.hpp"

namespace usol::harness {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw ConfigError("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

}  // namespace

double ExperimentConfig::tol(const std::string& label, double fallback) const {
  auto it = tolerances.find(label);
  return it == tolerances.end() ? fallback : it->second;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> e{
      {"dim", std::to_string(d)},
      {"signature-k", std::to_string(k)},
      {"grid", std::to_string(n)},
      {"box", fmt(L)},
      {"z-sweep", z_sweep},
      {"seed", std::to_string(seed)},
      {"profile", profile == Profile::Quick ? "quick" : "full"},
  };
  if (pair) e.emplace_back("pair", pair->to_string());
  if (!lambdas.empty()) {
    std::string s;
    for (double l : lambdas) s += (s.empty() ? "" : " ") + fmt(l);
    e.emplace_back("lambdas", s);
  }
  for (const auto& [k2, v] : tolerances) e.emplace_back("tol." + k2, fmt(v));
  return e;
}

RealVec parse_lambda_seq(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("lambda-seq: expected a:b:count");
  double a = to_double("lambda-seq", parts[0]), b = to_double("lambda-seq", parts[1]);
  long long c = to_int("lambda-seq", parts[2]);
  if (c < 2) throw ConfigError("lambda-seq: count must be at least 2");
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("lambda-seq: endpoints must be positive");
  return log_spaced(a, b, static_cast<int>(c));
}

std::vector<SpectralParameter> parse_z_sweep(const std::string& text) {
  auto parts = split(text, ':');
  if (parts[0] == "circle" && parts.size() == 2) {
    long long n = to_int("z-sweep", parts[1]);
    if (n < 1 || n > 4096) throw ConfigError("z-sweep: circle count must lie in [1, 4096]");
    return circle_sweep(static_cast<int>(n));
  }
  if (parts[0] == "line" && parts.size() == 5) {
    double a0 = to_double("z-sweep", parts[1]), a1 = to_double("z-sweep", parts[2]);
    double b = to_double("z-sweep", parts[3]);
    long long c = to_int("z-sweep", parts[4]);
    if (c < 1) throw ConfigError("z-sweep: line count must be positive");
    std::vector<SpectralParameter> out;
    for (long long i = 0; i < c; ++i) {
      double t = c == 1 ? 0.0 : double(i) / double(c - 1);
      out.push_back({a0 + t * (a1 - a0), b});
    }
    return out;
  }
  throw ConfigError("z-sweep: expected circle:N or line:a0:a1:b:count, got '" + text + "'");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_raw, const std::string& value_raw) {
  const std::string key = trim(key_raw), v = trim(value_raw);
  if (key == "dim" || key == "d") {
    cfg.d = static_cast<int>(to_int(key, v));
  } else if (key == "signature-k" || key == "k") {
    cfg.k = static_cast<int>(to_int(key, v));
  } else if (key == "grid" || key == "n") {
    cfg.n = static_cast<int>(to_int(key, v));
  } else if (key == "box" || key == "L") {
    cfg.L = to_double(key, v);
  } else if (key == "pair") {
    cfg.pair = parse_pair(v);
  } else if (key == "lambda-seq") {
    cfg.lambdas = parse_lambda_seq(v);
  } else if (key == "z-sweep") {
    parse_z_sweep(v);
    cfg.z_sweep = v;
  } else if (key == "out") {
    cfg.out_dir = v;
  } else if (key == "svg") {
    cfg.svg_dir = v;
  } else if (key == "seed") {
    long long s = to_int(key, v);
    if (s < 0) throw ConfigError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "profile") {
    if (v == "quick")
      cfg.profile = Profile::Quick;
    else if (v == "full")
      cfg.profile = Profile::Full;
    else
      throw ConfigError("profile must be quick or full");
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(to_int(key, v));
    if (cfg.workers < 0) throw ConfigError("workers must be nonnegative");
  } else if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
    cfg.tolerances[key.substr(4)] = to_double(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.d < 3) throw ConfigError("dim must be at least 3");
  if (cfg.k < 1 || cfg.k > cfg.d - 1) throw ConfigError("signature-k must lie in [1, dim-1]");
  if (cfg.n < 2 || (cfg.n & (cfg.n - 1)) != 0) throw ConfigError("grid must be a power of two");
  if (!(cfg.L > 0.0) || !std::isfinite(cfg.L)) throw ConfigError("box must be positive");
  for (double l : cfg.lambdas)
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("every lambda must lie in (0,1)");
  parse_z_sweep(cfg.z_sweep);
}

}  // namespace usol::harness
