#include "eerm/cli.hpp"

int main(int argc, char** argv) { return eerm::cli::run_main(argc, argv); }
