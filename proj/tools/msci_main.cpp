#include "msci/cli.hpp"

int main(int argc, char** argv) { return msci::cli::main(argc, argv); }
