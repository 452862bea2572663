#include <string>
#include <vector>

#include "radlearn/cli.hpp"

int main(int argc, char** argv) {
    return radlearn::run_cli(std::vector<std::string>(argv, argv + argc));
}
