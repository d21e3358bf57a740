#include <iostream>

#include "hidsym_cli/cli.hpp"

int main(int argc, char** argv) { return hidsym::cli::run_cli(argc, argv, std::cout, std::cerr); }
