#include "eni/cli.hpp"

int main(int argc, char** argv) { return eni::cli::run(argc, argv); }
