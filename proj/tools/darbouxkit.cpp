#include <iostream>

#include "darbouxkit/cli.hpp"

int main(int argc, char** argv) { return darbouxkit::run_cli(argc, argv, std::cout, std::cerr); }
