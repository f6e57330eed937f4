#include <iostream>
#include <string>
#include <vector>

#include "gdmd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gdmd::run_cli(args, std::cout, std::cerr);
}
