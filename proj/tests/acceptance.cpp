// Acceptance suite: one numbered check per invocation, printing a single
// [PASS]/[FAIL] line with the measured quantities. Run all via ctest.

#include <cstdio>
#include <string>

int run_criterion(int id);

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: srlab_acceptance <criterion 1..11>\n");
    return 2;
  }
  const int id = std::atoi(argv[1]);
  if (id < 1 || id > 11) {
    std::fprintf(stderr, "criterion must be 1..11\n");
    return 2;
  }
  return run_criterion(id);
}

int run_criterion(int) { return 1; }  // placeholder, filled in below
