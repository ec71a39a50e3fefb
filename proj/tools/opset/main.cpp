#include "opset/cli.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const int code = opset::cli::run(args, std::cout, std::cerr);
    std::cout.flush();
    std::cerr.flush();
    // A timed-out check may still be running on a detached worker.
    std::_Exit(code);
}
