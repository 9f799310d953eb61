#include <bvortex/cli.hpp>

int main(int argc, char** argv) { return bvortex::cli::run(argc, argv); }
