#include "mixnl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return mixnl::run_cli(argc, argv, std::cout, std::cerr);
}
