#include "mortcast/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mortcast::cli::run(argc, argv, std::cout, std::cerr); }
