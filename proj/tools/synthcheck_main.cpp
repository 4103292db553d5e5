#include "synthcheck/cli.hpp"

int main(int argc, char** argv) { return synthcheck::run_cli(argc, argv); }
