#include <iostream>

#include "heisliou/cli.hpp"

int main(int argc, char** argv) { return heis::cli::main(argc, argv, std::cout, std::cerr); }
