#include "eomsim/cli.hpp"

int main(int argc, char** argv) { return eomsim::run_cli(argc, argv); }
