#include <iostream>
#include <string>
#include <vector>

#include "bechdel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bechdel::run_cli(args, std::cout, std::cerr);
}
