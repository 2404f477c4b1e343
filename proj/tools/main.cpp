#include "commands.hpp"

int main(int argc, char** argv) { return hypermin::cli::run_cli(argc, argv); }
