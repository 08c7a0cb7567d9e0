#include "homsim/cli/commands.hpp"

int main(int argc, char** argv) { return homsim::cli::run(argc, argv); }
