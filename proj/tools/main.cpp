#include "fcmli/cli.hpp"

int main(int argc, char** argv) {
    return fcmli::run_cli(argc, argv);
}
