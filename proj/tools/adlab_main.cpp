#include <iostream>

#include "adlab/cli.hpp"

int main(int argc, char** argv) { return adlab::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
