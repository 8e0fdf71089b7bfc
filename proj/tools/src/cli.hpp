#pragma once

#include "config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace billiard::cli {

enum ExitCode : int {
    kPass = 0,
    kAssertionFailed = 1,
    kSolverFailure = 2,
    kUsageError = 3,
};

int cmd_phase_portrait(const StudyConfig& config, std::ostream& log);
int cmd_orbit(const StudyConfig& config, std::ostream& log);
int cmd_verify(const StudyConfig& config, std::ostream& log);
int cmd_fit(const StudyConfig& config, std::ostream& log);
int cmd_selftest(std::ostream& log);

/// Full command line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace billiard::cli
