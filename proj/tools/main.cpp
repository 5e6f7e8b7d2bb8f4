#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return toric::cli::main_entry(argc, argv, std::cout, std::cerr); }
