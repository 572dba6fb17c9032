#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "usol/harness.hpp"

namespace usol::harness {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw DimensionError("Table: row width does not match the header");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("Table: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool ExperimentReport::pass() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

double parse_num(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) return std::numeric_limits<double>::quiet_NaN();
  return v;
}

std::vector<std::size_t> matching_rows(const Check& c, const Table& t) {
  std::vector<std::size_t> out;
  std::size_t fc = c.filter_column.empty() ? 0 : t.column(c.filter_column);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (c.filter_column.empty() || t.rows[i][fc] == c.filter_value) out.push_back(i);
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"') o.push_back('"');
    o.push_back(ch);
  }
  o.push_back('"');
  return o;
}

std::string join(const std::vector<std::string>& f) {
  std::string o;
  for (std::size_t i = 0; i < f.size(); ++i) o += (i ? "," : "") + quote(f[i]);
  return o;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool inq = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (inq) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          inq = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      inq = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::pair<RealVec, RealVec> slope_data(const Check& c, const Table& t) {
  std::size_t xc = t.column(c.x_column), yc = t.column(c.column);
  RealVec x, y;
  for (std::size_t i : matching_rows(c, t)) {
    x.push_back(parse_num(t.rows[i][xc]));
    y.push_back(std::abs(parse_num(t.rows[i][yc])));
  }
  return {x, y};
}

}  // namespace

void evaluate(Check& c, const Table& t) {
  auto rows = matching_rows(c, t);
  double v = std::numeric_limits<double>::quiet_NaN();
  if (c.kind == "count") {
    v = static_cast<double>(rows.size());
  } else if (c.kind == "mismatches") {
    std::size_t a = t.column(c.column), b = t.column(c.x_column);
    v = 0.0;
    for (std::size_t i : rows)
      if (t.rows[i][a] != t.rows[i][b]) v += 1.0;
  } else if (c.kind == "slope") {
    auto [x, y] = slope_data(c, t);
    bool ok = x.size() >= 2;
    for (std::size_t i = 0; i < x.size() && ok; ++i) ok = x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i]);
    if (ok) v = fit_loglog(x, y).slope;
  } else if (!rows.empty()) {
    std::size_t col = t.column(c.column);
    RealVec vals;
    for (std::size_t i : rows) vals.push_back(parse_num(t.rows[i][col]));
    if (c.kind == "value") {
      v = vals.front();
    } else if (c.kind == "max") {
      v = *std::max_element(vals.begin(), vals.end());
    } else if (c.kind == "min") {
      v = *std::min_element(vals.begin(), vals.end());
    } else if (c.kind == "ratio") {
      double mx = *std::max_element(vals.begin(), vals.end()), mn = *std::min_element(vals.begin(), vals.end());
      v = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
    } else {
      throw ConfigError("Check: unknown kind '" + c.kind + "'");
    }
  }
  c.value = v;
  c.pass = !std::isnan(v) && v >= c.lo && v <= c.hi;
}

void evaluate_all(ExperimentReport& r) {
  for (auto& c : r.checks) evaluate(c, r.table);
}

std::string to_csv(const ExperimentReport& r, const std::string& timestamp) {
  std::ostringstream os;
  os << "# usol " << r.name << " generated " << timestamp << "\n";
  for (const auto& [k, v] : r.config) os << "# " << join({"config", k, v}) << "\n";
  for (const auto& c : r.checks)
    os << "# "
       << join({"check", c.label, c.kind, c.column, c.x_column, c.filter_column, c.filter_value, fmt(c.lo), fmt(c.hi),
                c.anchor})
       << "\n";
  for (const auto& c : r.checks) os << "# " << join({"verdict", c.label, fmt(c.value), c.pass ? "PASS" : "FAIL"}) << "\n";
  for (const auto& n : r.notes) os << "# " << join({"note", n}) << "\n";
  os << join(r.table.columns) << "\n";
  for (const auto& row : r.table.rows) os << join(row) << "\n";
  return os.str();
}

void write_csv(const ExperimentReport& r, const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  char ts[32];
  std::time_t now = std::time(nullptr);
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << to_csv(r, ts);
}

ExperimentReport recheck_csv_text(const std::string& text) {
  ExperimentReport r;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  std::vector<std::pair<std::string, std::string>> stored;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# usol ", 0) == 0) {
      std::istringstream ls(line.substr(7));
      ls >> r.name;
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      auto f = split_csv(line.substr(2));
      if (f[0] == "config" && f.size() == 3) {
        r.config.emplace_back(f[1], f[2]);
      } else if (f[0] == "check" && f.size() == 10) {
        Check c;
        c.label = f[1];
        c.kind = f[2];
        c.column = f[3];
        c.x_column = f[4];
        c.filter_column = f[5];
        c.filter_value = f[6];
        c.lo = parse_num(f[7]);
        c.hi = parse_num(f[8]);
        c.anchor = f[9];
        r.checks.push_back(c);
      } else if (f[0] == "verdict" && f.size() == 4) {
        stored.emplace_back(f[1], f[3]);
      } else if (f[0] == "note" && f.size() == 2) {
        r.notes.push_back(f[1]);
      }
      continue;
    }
    if (line.empty()) continue;
    if (!header) {
      r.table.columns = split_csv(line);
      header = true;
    } else {
      r.table.add_row(split_csv(line));
    }
  }
  if (!header) throw ConfigError("recheck: no header row");
  evaluate_all(r);
  for (const auto& [label, verdict] : stored) {
    auto it = std::find_if(r.checks.begin(), r.checks.end(), [&](const Check& c) { return c.label == label; });
    if (it == r.checks.end() || (it->pass ? "PASS" : "FAIL") != verdict)
      r.notes.push_back("recheck: stored verdict for " + label + " differs from the recomputed one");
  }
  return r;
}

ExperimentReport recheck_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return recheck_csv_text(ss.str());
}

void write_svg(const ExperimentReport& r, const std::string& path) {
  std::vector<const Check*> slopes;
  for (const auto& c : r.checks)
    if (c.kind == "slope") slopes.push_back(&c);
  const int W = 520, H = 360, M = 60;
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  const int total_h = H * std::max<std::size_t>(1, slopes.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << total_h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (slopes.empty()) out << "<text x=\"20\" y=\"30\">" << r.name << ": no slope checks</text>\n";
  for (std::size_t s = 0; s < slopes.size(); ++s) {
    const Check& c = *slopes[s];
    auto [x, y] = slope_data(c, r.table);
    RealVec lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > 0 && y[i] > 0) {
        lx.push_back(std::log10(x[i]));
        ly.push_back(std::log10(y[i]));
      }
    const int y0 = static_cast<int>(s) * H;
    out << "<text x=\"" << M << "\" y=\"" << y0 + 20 << "\">" << r.name << ": " << c.label << " (slope "
        << fmt(std::round(c.value * 1e4) / 1e4) << ", target [" << fmt(c.lo) << ", " << fmt(c.hi) << "])</text>\n";
    if (lx.size() < 2) continue;
    double xmin = *std::min_element(lx.begin(), lx.end()), xmax = *std::max_element(lx.begin(), lx.end());
    double ymin = *std::min_element(ly.begin(), ly.end()), ymax = *std::max_element(ly.begin(), ly.end());
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double v) { return M + (v - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto py = [&](double v) { return y0 + H - M - (v - ymin) / (ymax - ymin) * (H - 2 * M); };
    out << "<line x1=\"" << M << "\" y1=\"" << y0 + H - M << "\" x2=\"" << W - M << "\" y2=\"" << y0 + H - M
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << M << "\" y1=\"" << y0 + M << "\" x2=\"" << M << "\" y2=\"" << y0 + H - M
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"" << y0 + H - 20 << "\" text-anchor=\"middle\">log10 " << c.x_column
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << y0 + H / 2 << "\" transform=\"rotate(-90 16 " << y0 + H / 2
        << ")\" text-anchor=\"middle\">log10 |" << c.column << "|</text>\n";
    out << "<text x=\"" << M << "\" y=\"" << y0 + H - M + 16 << "\">" << fmt(std::round(xmin * 100) / 100)
        << "</text><text x=\"" << W - M << "\" y=\"" << y0 + H - M + 16 << "\" text-anchor=\"end\">"
        << fmt(std::round(xmax * 100) / 100) << "</text>\n";
    out << "<text x=\"" << M - 4 << "\" y=\"" << y0 + H - M << "\" text-anchor=\"end\">"
        << fmt(std::round(ymin * 100) / 100) << "</text><text x=\"" << M - 4 << "\" y=\"" << y0 + M + 4
        << "\" text-anchor=\"end\">" << fmt(std::round(ymax * 100) / 100) << "</text>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
      out << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i]) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    LineFit f = fit_line(lx, ly);
    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(f.intercept + f.slope * xmin) << "\" x2=\"" << px(xmax)
        << "\" y2=\"" << py(f.intercept + f.slope * xmax) << "\" stroke=\"crimson\" stroke-dasharray=\"6 3\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace usol::harness
