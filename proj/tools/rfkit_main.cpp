#include "rfkit/cli.hpp"

int main(int argc, char** argv) { return rfkit::cli_main(argc, argv); }
