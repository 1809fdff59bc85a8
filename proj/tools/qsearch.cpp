#include <iostream>
#include <string>
#include <vector>

#include "qsearch/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return qsearch::cli::main_entry(args, std::cin, std::cout, std::cerr);
}
