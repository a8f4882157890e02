#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace inflow::cli {

struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  bool quiet = false;
};

// Each command writes its run directory and returns the process exit code
// for outcomes that are not errors. Errors propagate as exceptions.
int mesh_generate(const CommonOptions& opts);
int mesh_validate(const CommonOptions& opts, const std::optional<std::filesystem::path>& mesh);
int solve(const CommonOptions& opts, const std::string& model);
int assimilate(const CommonOptions& opts);
int verify_estimates(const CommonOptions& opts);
int verify_contraction(const CommonOptions& opts);
int verify_gradient(const CommonOptions& opts);
int verify_convexity(const CommonOptions& opts);
int sweep(const CommonOptions& opts);

/// A check that ran to completion but did not hold.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace inflow::cli
