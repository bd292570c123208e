#include <iostream>
#include <vector>

#include "bidding/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bidding::cli_main(args, std::cout, std::cerr);
}
