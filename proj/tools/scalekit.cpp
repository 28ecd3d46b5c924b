#include <iostream>

#include "scalekit/cli.hpp"

int main(int argc, char** argv) {
  return scalekit::cli::main(argc, argv, std::cout, std::cerr);
}
