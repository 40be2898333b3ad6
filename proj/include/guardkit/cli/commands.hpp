#pragma once

#include <string>
#include <vector>

namespace guardkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Entry point shared by the executable and in-process tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace guardkit::cli
