#include "schatten/cli/cli.hpp"

int main(int argc, char** argv) { return schatten::cli::run_cli(argc, argv); }
