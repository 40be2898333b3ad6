#include "guardkit/cli/commands.hpp"

int main(int argc, char** argv) { return guardkit::cli::run(argc, argv); }
