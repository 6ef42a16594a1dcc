#include <iostream>

#include "lln/cli.hpp"

int main(int argc, char** argv) {
    return lln::cli::run(argc, argv, std::cout, std::cerr);
}
