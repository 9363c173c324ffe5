#include <iostream>

#include "spinsde/commands.hpp"

int main(int argc, char** argv) { return spinsde::run_cli(argc, argv, std::cout, std::cerr); }
