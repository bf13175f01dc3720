#include <iostream>

#include "pricelab/cli.hpp"

int main(int argc, char** argv) { return pricelab::run_cli(argc, argv, std::cout, std::cerr); }
