#include <iostream>
#include <string>
#include <vector>

#include "switchsync/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return switchsync::cli_main(args, std::cout, std::cerr);
}
