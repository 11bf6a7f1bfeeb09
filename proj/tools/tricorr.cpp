#include <iostream>

#include "tricorr/cli.hpp"

int main(int argc, char** argv) { return tricorr::cli::run(argc, argv, std::cout, std::cerr); }
