#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return spreadcast::cli::run(argc, argv, std::cout, std::cerr); }
