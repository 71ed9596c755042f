#include <iostream>

#include "fw/cli.hpp"

int main(int argc, char** argv) {
  return fw::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
