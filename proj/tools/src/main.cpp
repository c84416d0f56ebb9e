#include "dsea/cli/commands.hpp"
#include "dsea/common/log.hpp"

#include <iostream>

int main(int argc, char** argv) {
    dsea::log::init_from_env();
    return dsea::cli::run_cli(argc, argv, std::cout, std::cerr);
}
