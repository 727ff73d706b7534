#include <iostream>

#include "eabpsk/cli/app.hpp"

int main(int argc, char** argv) {
  return eabpsk::cli::run_cli(argc, argv, std::cout, std::cerr);
}
