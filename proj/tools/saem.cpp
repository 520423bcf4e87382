#include <iostream>
#include <string>
#include <vector>

#include "saem/cli.hpp"

int main(int argc, char** argv) {
  return saem::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
