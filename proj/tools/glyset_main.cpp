#include "glyset/cli.hpp"

int main(int argc, char** argv) { return glyset::cli::run_cli(argc, argv); }
