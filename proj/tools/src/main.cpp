#include "commands.hpp"

int main(int argc, char** argv) { return tpcgcn::cli::run(argc, argv); }
