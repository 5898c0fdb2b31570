#include <iostream>

#include "pacer/cli.hpp"

int main(int argc, char** argv) {
  return pacer::cli::main(argc, argv, {std::cout, std::cerr, 0});
}
