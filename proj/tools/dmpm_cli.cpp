#include "dmpm/io/cli.hpp"

int main(int argc, char** argv) { return dmpm::run_cli(argc, argv); }
