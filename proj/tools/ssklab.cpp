#include <iostream>

#include "ssklab/cli.hpp"

int main(int argc, char** argv) { return ssklab::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
