#include <iostream>

#include "dtn/cli.hpp"

int main(int argc, char** argv) {
    return dtn::cli::main(argc, argv, std::cout, std::cerr);
}
