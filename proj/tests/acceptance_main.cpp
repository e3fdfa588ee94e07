// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is 0 iff all pass.
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#include "gstlab/acceptance.hpp"

int main(int argc, char** argv) {
  gstlab::AcceptanceOptions opts;
  opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::string suite = argc > 1 ? argv[1] : "all";
  int failures = 0;
  for (int id : gstlab::suite_criteria(suite)) {
    const auto r = gstlab::run_criterion(id, opts);
    std::printf("%s\n", gstlab::format_line(r).c_str());
    std::fflush(stdout);
    failures += !r.pass();
  }
  std::printf("%s: %d failure(s)\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
