#include <iostream>

#include "ringbec/cli.hpp"

int main(int argc, char** argv) {
  return ringbec::run_cli(argc, argv, std::cout, std::cerr);
}
