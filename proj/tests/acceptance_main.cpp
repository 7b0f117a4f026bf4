// Runs the acceptance criteria and prints one pass/fail line per criterion.
// Usage: acceptance [criterion ...]; no arguments runs all of them.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "tonelli/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  try {
    for (const auto& r : tonelli::run_acceptance(wanted)) {
      std::printf("[%2d] %-30s %s  (%.1fs)%s%s\n", r.number, r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.seconds, r.details.empty() ? "" : "  ",
                  r.details.c_str());
      std::fflush(stdout);
      all_pass = all_pass && r.pass;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return all_pass ? 0 : 1;
}
