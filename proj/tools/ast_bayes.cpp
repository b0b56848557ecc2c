#include <iostream>

#include "astbayes/cli.hpp"

int main(int argc, char** argv) { return astbayes::cli::run(argc, argv, std::cout, std::cerr); }
