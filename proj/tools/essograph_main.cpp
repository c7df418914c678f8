#include "essograph/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return essograph::run_cli(argc, argv, std::cout, std::cerr);
}
