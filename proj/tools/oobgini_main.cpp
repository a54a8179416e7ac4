#include "oobgini/cli.hpp"

int main(int argc, char** argv) { return oobgini::cli::run(argc, argv); }
