#include <iostream>
#include <string>
#include <vector>

#include "srlab/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return srlab::cli_main(args, std::cout, std::cerr);
}
