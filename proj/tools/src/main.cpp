#include <iostream>

#include "herglotz_cli/commands.hpp"

int main(int argc, char** argv) { return herglotz::cli::run(argc, argv, std::cout, std::cerr); }
