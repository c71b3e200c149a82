#include <iostream>
#include <string>
#include <vector>

#include "tavc/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return tavc::run_cli(std::vector<std::string>(argv, argv + argc), std::cin, std::cout, std::cerr);
}
