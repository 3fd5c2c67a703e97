#include "icm/cli.hpp"

int main(int argc, char** argv) { return icm::cli::main_entry(argc, argv); }
