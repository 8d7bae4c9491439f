#include <iostream>

#include "hfarray/cli.hpp"

int main(int argc, char** argv) {
  return hfarray::cli::main(argc, argv, std::cout, std::cerr);
}
