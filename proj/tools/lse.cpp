#include "lse/cli.hpp"

int main(int argc, char** argv) { return lse::run_cli(argc, argv); }
