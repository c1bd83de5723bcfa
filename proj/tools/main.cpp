#include <unistd.h>

#include <iostream>

#include "cli.hpp"
#include "njexl/io.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    njexl::cli::Options options;
    options.interactive = isatty(STDIN_FILENO) != 0;
    options.env = njexl::IoPorts::standard().env;
    int code = njexl::cli::run({argv + 1, argv + argc}, std::cin, std::cout, std::cerr, options);
    std::cout.flush();
    return code;
}
