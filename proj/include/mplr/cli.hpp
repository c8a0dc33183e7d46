#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace mplr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBudget = 2;

/// Flat `key = value` lines; `#` starts a comment. Throws std::runtime_error on malformed lines.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

/// Entry point of the `mplr` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mplr::cli
