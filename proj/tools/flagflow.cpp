#include "flagflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return flagflow::cli::run(argc, argv, std::cout, std::cerr); }
