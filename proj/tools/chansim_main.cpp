#include "chansim/cli.hpp"

int main(int argc, char** argv) { return chansim::run_main(argc, argv); }
