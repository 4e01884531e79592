#include "alphamhd/cli.hpp"

int main(int argc, char** argv) { return alphamhd::run_cli(argc, argv); }
