#include <iostream>

#include "choiforge/cli.hpp"

int main(int argc, char** argv) { return choiforge::cli::run(argc, argv, std::cout, std::cerr); }
