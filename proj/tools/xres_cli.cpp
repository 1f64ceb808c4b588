#include "xres/cli.hpp"

int main(int argc, char** argv) { return xres::cli::run(argc, argv); }
