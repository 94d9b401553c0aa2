#include <iostream>

#include "latsol/cli.hpp"

int main(int argc, char** argv) {
  return latsol::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
