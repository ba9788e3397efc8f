#include <iostream>
#include <string>
#include <vector>

#include "pk/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  pk::CliResult res = pk::run_cli(args);
  std::cout << res.out;
  std::cerr << res.err;
  return res.status;
}
