#include <iostream>
#include <string>
#include <vector>

#include "ldsc/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ldsc::cli::run(args, std::cout, std::cerr);
}
