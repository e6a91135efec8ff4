#include <string>
#include <vector>

#include "jed/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return jed::cli::run(args);
}
