#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ballflow::cli::run(args, std::cout, std::cerr);
}
