#include "hqmm/cli.hpp"

int main(int argc, char** argv) { return hqmm::run_cli(argc, argv); }
