#include <iostream>
#include <string>
#include <vector>

#include "epictrl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return epictrl::cli::run(args, std::cout, std::cerr);
}
