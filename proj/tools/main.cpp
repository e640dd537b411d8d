#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return vfcal::cli::run(argc, argv, std::cout, std::cerr); }
