#include <iostream>

#include "cro/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cro::cli::main(args, std::cout, std::cerr);
}
