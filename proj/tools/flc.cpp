#include "flc/cli.hpp"

int main(int argc, char** argv) { return flc::cli::runCli(argc, argv); }
