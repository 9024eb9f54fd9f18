#include <iostream>

#include "ticklab/cli.hpp"

int main(int argc, char** argv) { return ticklab::cli::run(argc, argv, std::cout, std::cerr); }
