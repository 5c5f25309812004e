#pragma once

#include "cptdp/bellman.hpp"
#include "cptdp/cpt_spec.hpp"
#include "cptdp/distribution.hpp"
#include "cptdp/markov_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cptdp {

/// Malformed or semantically invalid input file. `field()` is a dotted path
/// to the offending entry, e.g. "w_plus.delta".
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

CptSpec parse_spec(std::string_view json_text);
CptSpec load_spec(const std::filesystem::path& path);
std::string spec_to_json(const CptSpec& spec);

/// {"atoms": [[value, mass], ...]}; must be a proper law.
DiscreteDistribution parse_distribution(std::string_view json_text);
DiscreteDistribution load_distribution(const std::filesystem::path& path);
std::string distribution_to_json(const DiscreteDistribution& dist);

struct ModelLoadOptions {
  /// Keep models that fail validate_model instead of raising FormatError.
  bool allow_invalid = false;
};

MarkovModel parse_model(std::string_view json_text, ModelLoadOptions options = {});
MarkovModel load_model(const std::filesystem::path& path, ModelLoadOptions options = {});
std::string model_to_json(const MarkovModel& model);

using ReportHeader = std::vector<std::pair<std::string, std::string>>;

/// JSON report: header entries, convergence data, value and policy by state.
void write_solve_report(std::ostream& out, const MarkovModel& model, const SolveResult& result,
                        const ReportHeader& header);

/// CSV with header iteration,residual; iterations count from 1.
void write_residual_csv(std::ostream& out, const SolveResult& result);

}  // namespace cptdp
