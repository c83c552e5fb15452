#include <iostream>
#include <string>
#include <vector>

#include "sng/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sng::run_cli(args, std::cout, std::cerr);
}
