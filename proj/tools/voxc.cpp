#include "voxc/cli.hpp"

int main(int argc, char** argv) {
    return voxc::cli::run(argc, argv);
}
