#include "rse/cli.hpp"

int main(int argc, char** argv) { return rse::cli_main(argc, argv); }
