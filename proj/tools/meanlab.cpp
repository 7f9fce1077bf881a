#include <iostream>

#include "meanlab_cli.hpp"

int main(int argc, char** argv) { return meanlab::cli::run(argc, argv, std::cout, std::cerr); }
