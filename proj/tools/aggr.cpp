#include <iostream>

#include "aggr/cli/commands.hpp"

int main(int argc, char** argv) {
    return aggr::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
