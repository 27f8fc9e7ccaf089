#include <string>
#include <vector>

#include "morsejt/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return morsejt::cli::run(args);
}
