#include <iostream>

#include "gaitforge/cli/commands.hpp"

int main(int argc, char** argv) { return gaitforge::cli::run_cli(argc, argv, std::cout, std::cerr); }
