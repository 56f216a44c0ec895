#include "cli/common.hpp"

int main(int argc, char** argv) { return nvthermo::cli::run(argc, argv); }
