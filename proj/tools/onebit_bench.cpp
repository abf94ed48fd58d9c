#include "onebit/cli.hpp"

int main(int argc, char** argv) { return onebit::bench::cli_run(argc, argv); }
