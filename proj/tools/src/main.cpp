#include <iostream>

#include "pkm/commands.hpp"

int main(int argc, char** argv) { return pkm::cli::run(argc, argv, std::cout, std::cerr); }
