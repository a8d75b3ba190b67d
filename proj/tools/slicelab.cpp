#include <iostream>

#include "slicelab/cli.hpp"

int main(int argc, char** argv) { return slicelab::cli::run(argc, argv, std::cout, std::cerr); }
