#include "algset/cli.hpp"

int main(int argc, char** argv) {
    return algset::cli::run(argc, argv);
}
