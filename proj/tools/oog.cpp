#include "oog/cli.hpp"

int main(int argc, char** argv) { return oog::run_cli(argc, argv); }
