#include "swissgambit/cli.hpp"

int main(int argc, char** argv) { return swissgambit::cli::main(argc, argv); }
