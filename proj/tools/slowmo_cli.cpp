#include "slowmo/cli.hpp"

int main(int argc, char** argv) { return slowmo::run_cli(argc, argv); }
