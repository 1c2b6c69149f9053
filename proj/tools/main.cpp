#include <iostream>
#include <string>
#include <vector>

#include "bagforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bagforge::run_command(args, std::cin, std::cout, std::cerr);
}
