#include <string>
#include <vector>

#include "spgemm/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv + 1, argv + argc);
    return spgemm::run_cli(args);
}
