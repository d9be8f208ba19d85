#include "cli.hpp"

int main(int argc, char** argv) { return modclust::cli::cli_main(argc, argv); }
