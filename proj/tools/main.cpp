#include "anisoflow/cli.hpp"

int main(int argc, char** argv) { return anisoflow::cli::main(argc, argv); }
