#include <iostream>

#include "grafcet/cli.hpp"

int main(int argc, char** argv) {
  return grafcet::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
