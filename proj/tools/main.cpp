#include "nettax/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return nettax::cli::run(argc, argv, std::cout, std::cerr);
}
