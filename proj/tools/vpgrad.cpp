#include <iostream>
#include <string>
#include <vector>

#include "vpgrad/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return vpgrad::cli::run(args, std::cout, std::cerr);
}
