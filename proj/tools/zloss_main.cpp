#include "zloss_cli.hpp"

int main(int argc, char** argv) { return zloss::cli::run(argc, argv); }
