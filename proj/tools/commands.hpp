#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seedo::cli {

inline constexpr int kOk = 0;
inline constexpr int kDataError = 2;
inline constexpr int kPipelineFailure = 3;
inline constexpr int kUsage = 64;
inline constexpr int kConfig = 78;

/// Runs one CLI invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seedo::cli
