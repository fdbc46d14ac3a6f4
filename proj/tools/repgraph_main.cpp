#include "repgraph/cli.hpp"

int main(int argc, char** argv) { return repgraph::cli::run(argc, argv); }
