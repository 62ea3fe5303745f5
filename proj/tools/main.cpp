#include "mgt/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mgt::cli::dispatch(argc, argv, std::cout, std::cerr); }
