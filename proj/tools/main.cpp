#include "induction/cli.hpp"

int main(int argc, char** argv) { return induction::cli::run(argc, argv); }
