// Acceptance battery: one line per criterion, nonzero exit on any failure.
// Usage: acceptance [--quick] [id...]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "blowup/acceptance.hpp"

int main(int argc, char** argv) {
  blowup::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") {
      opt.quick = true;
    } else {
      opt.only.push_back(std::atoi(a.c_str()));
    }
  }
  int failed = 0;
  blowup::run_acceptance(opt, [&](const blowup::CriterionResult& r) {
    std::printf("%s\n", blowup::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%s: %d criteria failed\n", opt.quick ? "quick" : "full", failed);
  return failed == 0 ? 0 : 1;
}
