#include <iostream>

#include "mrt/verify/cli.hpp"

int main(int argc, char** argv) { return mrt::verify::run_cli(argc, argv, std::cout, std::cerr); }
