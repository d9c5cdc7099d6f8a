#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncerg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitCheckerFailure = 2;

struct Options {
  std::string subcommand;
  std::string config;
  std::string out = ".";
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  std::optional<double> tolerance;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes <out>/<subcommand>.csv and .json.
int run(const Options& options);

}  // namespace ncerg::cli
