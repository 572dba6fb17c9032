// Runs every experiment at its acceptance settings and prints one verdict line per criterion.
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>

#include "usol/harness.hpp"

using namespace usol;
using namespace usol::harness;

int main(int argc, char** argv) {
  std::string out = "acceptance_out";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--out") == 0) out = argv[i + 1];
  std::filesystem::create_directories(out);

  ExperimentConfig cfg;
  cfg.out_dir = out;
  std::map<int, bool> verdict;
  std::map<int, std::string> detail;
  for (const auto& name : experiment_names()) {
    bool ok = false;
    std::string why;
    const int crit = experiment_criterion(name);
    try {
      ExperimentReport r = run_experiment(name, cfg);
      write_csv(r, (std::filesystem::path(out) / (name + ".csv")).string());
      bool in_budget = r.budget_s <= 0.0 || r.runtime_s <= r.budget_s;
      ok = r.pass() && in_budget;
      for (const auto& c : r.checks)
        if (!c.pass) why += " " + c.label + "=" + fmt(c.value);
      if (!in_budget) why += " over budget";
      char buf[128];
      std::snprintf(buf, sizeof buf, " %s %.1fs/%.0fs", name.c_str(), r.runtime_s, r.budget_s);
      detail[crit] += buf;
    } catch (const std::exception& e) {
      why = std::string(" error: ") + e.what();
      std::fprintf(stderr, "%s:%s\n", name.c_str(), why.c_str());
    }
    verdict[crit] = (verdict.count(crit) ? verdict[crit] : true) && ok;
    if (!why.empty()) detail[crit] += " [" + why.substr(1) + "]";
    std::fflush(stdout);
  }
  int failed = 0;
  for (int c = 1; c <= 15; ++c) {
    bool ok = verdict.count(c) && verdict[c];
    failed += !ok;
    std::printf("criterion %2d: %s%s\n", c, ok ? "PASS" : "FAIL", detail[c].c_str());
  }
  std::printf("%d of 15 criteria pass\n", 15 - failed);
  return failed == 0 ? 0 : 1;
}
