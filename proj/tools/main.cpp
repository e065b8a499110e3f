#include <iostream>

#include "ddc/cli.hpp"

int main(int argc, char** argv) {
  return ddc::experiment::run_cli(argc, argv, std::cout, std::cerr);
}
