// One PASS/FAIL line per acceptance criterion. Criterion 9 repeats the whole run and compares
// the JSON reports byte for byte.
#include <iostream>

#include "zfqft/experiments.hpp"

using namespace zfqft;

int main(int argc, char** argv) {
  Config base;
  if (argc > 1) base = load_config(argv[1]);
  quiet_flag() = true;

  auto first = run_criteria(base, [](const Criterion& c) { std::cout << c.line() << std::endl; });
  bool all = true;
  for (const auto& c : first) all = all && c.passed();

  std::string a = report_json(base, acceptance_outcome(first)).dump(2);
  auto t0 = std::chrono::steady_clock::now();
  std::string b = report_json(base, acceptance_outcome(run_criteria(base))).dump(2);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool same = a == b;
  std::size_t at = 0;
  while (at < std::min(a.size(), b.size()) && a[at] == b[at]) ++at;
  std::cout << strf("criterion 9: %s  determinism  [%zu-byte report, second run %s]  (%.2f s)", pf(same), a.size(),
                    same ? "byte-identical" : strf("differs at byte %zu", at).c_str(), secs)
            << std::endl;
  all = all && same;
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
