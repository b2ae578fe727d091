#include "evsg/cli/cli.hpp"

int main(int argc, char** argv) { return evsg::cli::run(argc, argv); }
