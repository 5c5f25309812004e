#pragma once

#include "cptdp/bellman.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cptdp::harness {

/// Failure reported to the user as a single line "error[<kind>]: <message>".
class CliError : public std::runtime_error {
 public:
  CliError(std::string kind, const std::string& message) : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

/// Parameters shared by all subcommands; each command reads the blocks it
/// needs and ignores the rest.
struct RunConfig {
  std::optional<std::filesystem::path> model_path;
  std::optional<std::filesystem::path> spec_path;
  std::optional<std::filesystem::path> dist_path;
  std::optional<std::filesystem::path> generator_path;
  std::optional<std::filesystem::path> out_dir;
  std::uint64_t seed = 0;

  SolveConfig solve;
  bool allow_invalid = false;

  std::vector<std::size_t> ns{100, 1000, 10000};
  std::size_t repeats = 20;

  std::size_t trials = 1000;
  std::size_t k_max = 50;
  std::size_t horizon = 100000;
  std::size_t threads = 0;  ///< bench workers; 0 picks the hardware count

  /// Throws CliError("io") if a given input path does not exist or a required
  /// one is missing.
  void require_inputs(std::initializer_list<const char*> required) const;
};

/// Description of the seed splitting, written into every report header.
std::string seed_scheme();

int cmd_evaluate(const RunConfig& cfg, std::ostream& out);
int cmd_estimate(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_check(const RunConfig& cfg, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);

}  // namespace cptdp::harness
