#include "ubi/cli.hpp"

int main(int argc, char** argv) { return ubi::cli::run(argc, argv); }
