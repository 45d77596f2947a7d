#include <vector>

#include "ewnoise/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ewnoise::cli::run(args);
}
