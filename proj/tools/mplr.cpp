#include <iostream>

#include "mplr/cli.hpp"

int main(int argc, char** argv) { return mplr::cli::run(argc, argv, std::cout, std::cerr); }
