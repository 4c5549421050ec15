#include "garz/cli.hpp"

int main(int argc, char** argv) { return garz::cli::run(argc, argv); }
