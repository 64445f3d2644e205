#include <iostream>
#include <string>
#include <vector>

#include "relwave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relwave::run_cli(args, std::cout, std::cerr);
}
