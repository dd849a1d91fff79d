#include <iostream>

#include "samp/cli.hpp"

int main(int argc, char** argv) { return samp::run_cli(argc, argv, std::cout, std::cerr); }
