#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return billiard::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
