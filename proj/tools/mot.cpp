#include <iostream>

#include "mot/cli.hpp"

int main(int argc, char** argv) { return mot::run_cli(argc, argv, std::cout, std::cerr); }
