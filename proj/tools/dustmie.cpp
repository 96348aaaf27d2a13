#include <iostream>

#include "dustmie/cli/commands.hpp"

int main(int argc, char** argv) { return dustmie::cli::run_cli(argc, argv, std::cout, std::cerr); }
