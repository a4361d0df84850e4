#include <iostream>

#include "esoform/cli.hpp"

int main(int argc, char** argv) {
  return esoform::run_cli(argc, argv, std::cout, std::cerr);
}
