#include <iostream>

#include "randgeo/cli.hpp"

int main(int argc, char** argv) { return randgeo::cli::main(argc, argv, std::cout, std::cerr); }
