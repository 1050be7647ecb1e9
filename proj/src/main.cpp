#include "qcav/cli.hpp"

int main(int argc, char** argv) { return qcav::cli_main(argc, argv); }
