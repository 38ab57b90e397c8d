#include "popspace/cli.hpp"

int main(int argc, char** argv) { return popspace::run_cli(argc, argv); }
