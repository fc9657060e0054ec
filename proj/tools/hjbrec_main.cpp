#include <iostream>

#include "hjbrec/cli.hpp"

int main(int argc, char** argv) {
  return hjbrec::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
