#pragma once

#include "cptdp/cpt_spec.hpp"
#include "cptdp/distribution.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cptdp {

/// i.i.d. draws of X together with where they came from.
struct SampleBatch {
  std::vector<double> samples;
  std::uint64_t seed = 0;
  std::string source_label;
};

struct EstimatorResult {
  double value = 0.0;          // positive_part - negative_part
  double positive_part = 0.0;
  double negative_part = 0.0;
  std::size_t n = 0;
};

/// Order-statistics estimate of the CPT value of the law behind `batch`:
///
///   C+ = sum_i u+((X_[i] - b)+) * (w+((n+1-i)/n) - w+((n-i)/n))
///   C- = sum_i u-((X_[i] - b)-) * (w-(i/n) - w-((i-1)/n))
///
/// with X_[1] <= ... <= X_[n]. Ties are ordered by original index. Throws
/// std::invalid_argument on an empty batch or a non-finite sample.
EstimatorResult estimate_cpt(const SampleBatch& batch, const CptSpec& spec);

/// Seeded inverse-CDF sampler over a proper discrete law.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(DiscreteDistribution law, std::string label = "discrete");

  SampleBatch draw(std::size_t n, std::uint64_t seed) const;
  const DiscreteDistribution& law() const { return law_; }
  const std::string& label() const { return label_; }

 private:
  DiscreteDistribution law_;
  std::vector<double> cumulative_;
  std::string label_;
};

struct ConvergenceRow {
  std::size_t n;
  std::size_t repeat;
  std::uint64_t seed;
  double estimate;
  double abs_error;
};

struct ConvergenceSummary {
  std::size_t n;
  double mean_abs_error;
  double std_abs_error;
  double median_abs_error;
};

struct ConvergenceStudy {
  double ground_truth = 0.0;
  std::vector<ConvergenceRow> rows;        // n ascending, repeat ascending
  std::vector<ConvergenceSummary> summary;  // one per n
};

/// Seed used for (index of n in ns, repeat) by convergence_study.
std::uint64_t convergence_seed(std::uint64_t master_seed, std::size_t n_index, std::size_t repeat);

/// Error curve of estimate_cpt against cpt_value_exact of the sampler's law.
/// `ns` must be strictly ascending and `repeats` positive.
ConvergenceStudy convergence_study(const DiscreteSampler& sampler, const CptSpec& spec,
                                   std::span<const std::size_t> ns, std::size_t repeats,
                                   std::uint64_t master_seed);

/// CSV with header n,repeat,estimate,abs_error in row order.
void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study);

}  // namespace cptdp
