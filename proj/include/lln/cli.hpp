#pragma once

#include <iosfwd>

namespace lln::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitStrict = 2;

// Environment variable naming a config file read when --config is absent.
inline constexpr const char* kConfigEnv = "LLN_CONFIG";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lln::cli
