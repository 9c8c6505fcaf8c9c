// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "selftest.hpp"

int main(int argc, char** argv) {
  namespace st = fracdrift::selftest;
  CLI::App app{"fracdrift acceptance suite"};
  st::Options opt;
  std::string json_path;
  app.add_option("--seed", opt.seed, "Master seed");
  app.add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  app.add_option("--only", opt.only, "Criterion ids to run")->delimiter(',');
  app.add_option("--json", json_path, "Write the full reports here");
  CLI11_PARSE(app, argc, argv);

  std::vector<st::CriterionResult> results;
  try {
    results = st::run(opt, [](const st::CriterionResult& r) {
      std::cout << st::summary_line(r) << std::endl;
    });
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
  if (!json_path.empty()) std::ofstream(json_path) << st::to_json(results, opt).dump(2) << "\n";

  int failed = 0;
  for (const auto& r : results) failed += r.passed() ? 0 : 1;
  if (failed == 0)
    std::printf("ALL PASSED: %zu criteria\n", results.size());
  else
    std::printf("FAILED: %d of %zu criteria\n", failed, results.size());
  return failed == 0 ? 0 : 1;
}
