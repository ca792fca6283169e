#include <iostream>

#include "tropic/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tropic::run_cli(std::move(args), std::cout, std::cerr);
}
