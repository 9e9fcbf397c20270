#include <iostream>

#include "aoapos/cli.hpp"

int main(int argc, char** argv) { return aoapos::cli::run(argc, argv, std::cout, std::cerr); }
