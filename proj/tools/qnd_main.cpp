#include "cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return qnd::cli::main_entry(argc, argv, std::cout, std::cerr); }
