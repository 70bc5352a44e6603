#include <iostream>

#include "growfs/cli.hpp"

int main(int argc, char** argv) { return growfs::cli::main(argc, argv, std::cout, std::cerr); }
