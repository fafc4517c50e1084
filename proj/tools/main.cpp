#include <iostream>
#include <string>
#include <vector>

#include "deadreckon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return deadreckon::cli::run(args, std::cout, std::cerr);
}
