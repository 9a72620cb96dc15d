#include <iostream>
#include <string>
#include <vector>

#include "mlcd/cli.hpp"

int main(int argc, char** argv) {
  return mlcd::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
