#include "distortion/cli.hpp"

int main(int argc, char** argv) { return distortion::cli_main(argc, argv); }
