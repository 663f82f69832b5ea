#include <iostream>
#include <string>
#include <vector>

#include "fps/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return fps::cli::run(args, std::cout, std::cerr);
}
