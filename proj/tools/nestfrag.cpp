#include "nestfrag/cli.hpp"

int main(int argc, char** argv) { return nestfrag::cli::run_cli(argc, argv); }
