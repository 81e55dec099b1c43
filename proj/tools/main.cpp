#include <cstdio>
#include <string>
#include <vector>

#include "dichotomy/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    auto result = dichotomy::cli::run_command(args);
    if (!result.wrote_file) {
        std::fputs(result.report.c_str(), stdout);
        std::fputc('\n', stdout);
    }
    return result.exit_code;
}
