#include <iostream>

#include "phonovec/commands.hpp"

int main(int argc, char** argv) { return phonovec::run_cli(argc, argv, std::cout, std::cerr); }
