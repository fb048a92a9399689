#include <iostream>

#include "reflexgrid/cli.hpp"

int main(int argc, char** argv) { return reflexgrid::cli::run_cli(argc, argv, std::cout, std::cerr); }
