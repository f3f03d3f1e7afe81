#include "hartree/cli.hpp"

int main(int argc, char** argv) { return hartree::run_cli(argc, argv); }
