#include <string>
#include <vector>

#include "gridatlas/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gridatlas::cli_main(args);
}
