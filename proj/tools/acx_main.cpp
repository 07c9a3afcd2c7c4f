#include <iostream>

#include "acx/cli.hpp"

int main(int argc, char** argv) { return acx::run_cli(argc, argv, std::cout, std::cerr); }
