#include "gvecf/cli.hpp"

int main(int argc, char** argv) {
    return gvecf::cli_run(argc, argv);
}
