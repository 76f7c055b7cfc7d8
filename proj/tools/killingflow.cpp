#include <iostream>
#include <string>
#include <vector>

#include "killingflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kflow::dispatch(args, std::cout, std::cerr);
}
