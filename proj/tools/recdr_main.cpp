#include <iostream>

#include "recdr/cli.hpp"

int main(int argc, char** argv) { return recdr::cli::run(argc, argv, std::cout, std::cerr); }
