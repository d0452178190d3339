#include <iostream>
#include <string>
#include <vector>

#include "recordminer/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const std::vector<std::string> args(argv, argv + argc);
    return recordminer::cli::run(args, std::cin, std::cout, std::cerr);
}
