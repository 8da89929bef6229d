#include <iostream>
#include <string>
#include <vector>

#include "causal/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return causal::cli::run(args, std::cout, std::cerr);
}
