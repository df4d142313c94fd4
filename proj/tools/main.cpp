#include "complab/cli.hpp"

int main(int argc, char** argv) { return complab::cli::run(argc, argv); }
