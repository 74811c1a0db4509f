#include "quadlab/harness/cli.hpp"

int main(int argc, char** argv) { return quadlab::harness::run_cli(argc, argv); }
