#include <iostream>

#include "starkdisk/cli.hpp"

int main(int argc, char** argv) { return starkdisk::cli::run_cli(argc, argv, std::cout, std::cerr); }
