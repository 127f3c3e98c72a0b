#include <shadowjob/cli.hpp>

int main(int argc, char** argv) {
    return shadowjob::cli_run(argc, argv);
}
