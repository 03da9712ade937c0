#pragma once

namespace chansim {

// Experiment driver entry point; returns the process exit code
// (0 success, 2 validation error, 3 guard exceeded, 4 infeasible instance).
int run_main(int argc, char** argv);

}  // namespace chansim
