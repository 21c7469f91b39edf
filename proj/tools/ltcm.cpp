#include "ltcm/cli.hpp"

int main(int argc, char** argv) { return ltcm::cli::run(argc, argv); }
