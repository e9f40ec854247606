#include "sid/cli.hpp"

int main(int argc, char** argv) { return sid::cli_main(argc, argv); }
