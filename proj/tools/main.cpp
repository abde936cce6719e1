#include "cli.hpp"

int main(int argc, char** argv) { return bimt::run_cli(argc, argv); }
