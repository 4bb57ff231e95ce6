#include <iostream>

#include "dephasim/cli.hpp"

int main(int argc, char** argv) {
    return dephasim::cli::main_entry(argc, argv, std::cout, std::cerr);
}
