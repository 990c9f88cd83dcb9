#include "dpgec/cli.hpp"

int main(int argc, char** argv) { return dpgec::cli::run(argc, argv); }
