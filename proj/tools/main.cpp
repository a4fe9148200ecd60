#include <iostream>
#include <string>
#include <vector>

#include "sbilint/report/report.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sbilint::report::run(args, std::cout, std::cerr);
}
