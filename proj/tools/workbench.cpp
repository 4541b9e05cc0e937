#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return wb::run(argc, argv, std::cout, std::cerr); }
