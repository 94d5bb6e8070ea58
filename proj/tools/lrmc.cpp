#include <iostream>

#include "lrmc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lrmc::cli::run(args, std::cout, std::cerr);
}
