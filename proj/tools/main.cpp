// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tokengraph::cli::run(args, std::cout, std::cerr);
}
