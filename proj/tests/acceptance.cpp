// One line per acceptance criterion; exit status is the number of failures.
// Optional arguments select criteria by id.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "jostlab/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = jostlab::suite_criteria("all");
  int failed = 0;
  for (int id : ids) {
    auto r = jostlab::run_criterion(id);
    std::printf("%s\n", jostlab::format_line(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed == 0 ? 0 : 1;
}
