#include <iostream>

#include "dihedral/cli.hpp"

int main(int argc, char** argv) { return dihedral::run(argc, argv, std::cout, std::cerr); }
