#include <iostream>

#include "fairgroups_cli.hpp"

int main(int argc, char** argv) { return fairgroups::cli::run(argc, argv, std::cout, std::cerr); }
