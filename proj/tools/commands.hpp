#pragma once

namespace agcas::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 bad arguments.
int run(int argc, char** argv);

}  // namespace agcas::cli
