#include "cptdp/estimator.hpp"

#include "cptdp/cpt_value.hpp"
#include "cptdp/format.hpp"
#include "cptdp/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cptdp {

EstimatorResult estimate_cpt(const SampleBatch& batch, const CptSpec& spec) {
  const auto& xs = batch.samples;
  if (xs.empty()) throw std::invalid_argument("estimate_cpt: empty sample batch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      std::ostringstream msg;
      msg << "estimate_cpt: sample " << i << " is not finite";
      throw std::invalid_argument(msg.str());
    }
  }

  std::vector<double> sorted = xs;
  std::stable_sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const double nd = static_cast<double>(n);
  const double b = spec.reference_point;
  double pos = 0.0;
  double neg = 0.0;
  // A run of tied order statistics k..m-1 shares one utility, so its weight
  // increments telescope to a single difference.
  for (std::size_t k = 0; k < n;) {
    std::size_t m = k + 1;
    while (m < n && sorted[m] == sorted[k]) ++m;
    const double lo = static_cast<double>(k);
    const double hi = static_cast<double>(m);
    const double d = sorted[k] - b;
    if (d > 0.0) {
      pos += spec.u_plus(d) * (spec.w_plus((nd - lo) / nd) - spec.w_plus((nd - hi) / nd));
    } else if (d < 0.0) {
      neg += spec.u_minus(-d) * (spec.w_minus(hi / nd) - spec.w_minus(lo / nd));
    }
    k = m;
  }
  return {pos - neg, pos, neg, n};
}

DiscreteSampler::DiscreteSampler(DiscreteDistribution law, std::string label)
    : law_(std::move(law)), label_(std::move(label)) {
  if (!law_.is_proper()) throw std::invalid_argument("DiscreteSampler: law must be proper");
  if (law_.size() == 0) throw std::invalid_argument("DiscreteSampler: law has no atoms");
  cumulative_.reserve(law_.size());
  double acc = 0.0;
  for (const Atom& a : law_.atoms()) {
    acc += a.mass;
    cumulative_.push_back(acc);
  }
}

SampleBatch DiscreteSampler::draw(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  SampleBatch batch;
  batch.seed = seed;
  batch.source_label = label_;
  batch.samples.reserve(n);
  const auto atoms = law_.atoms();
  const double total = cumulative_.back();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t j = static_cast<std::size_t>(it - cumulative_.begin());
    if (j >= atoms.size()) j = atoms.size() - 1;
    // Never land on a zero-mass atom through rounding at a boundary.
    while (atoms[j].mass == 0.0 && j > 0) --j;
    batch.samples.push_back(atoms[j].value);
  }
  return batch;
}

std::uint64_t convergence_seed(std::uint64_t master_seed, std::size_t n_index, std::size_t repeat) {
  return derive_seed(derive_seed(master_seed, n_index), repeat);
}

ConvergenceStudy convergence_study(const DiscreteSampler& sampler, const CptSpec& spec,
                                   std::span<const std::size_t> ns, std::size_t repeats,
                                   std::uint64_t master_seed) {
  if (ns.empty()) throw std::invalid_argument("convergence_study: no sample sizes given");
  if (repeats == 0) throw std::invalid_argument("convergence_study: repeats must be positive");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw std::invalid_argument("convergence_study: sample sizes must be positive");
    if (i > 0 && ns[i] <= ns[i - 1]) {
      throw std::invalid_argument("convergence_study: sample sizes must be strictly ascending");
    }
  }

  ConvergenceStudy study;
  study.ground_truth = cpt_value_exact(sampler.law(), spec);
  study.rows.reserve(ns.size() * repeats);

  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> errors;
    errors.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
      const std::uint64_t seed = convergence_seed(master_seed, i, r);
      const auto est = estimate_cpt(sampler.draw(ns[i], seed), spec);
      const double err = std::abs(est.value - study.ground_truth);
      study.rows.push_back({ns[i], r, seed, est.value, err});
      errors.push_back(err);
    }
    const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(repeats);
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    const double sd = repeats > 1 ? std::sqrt(var / static_cast<double>(repeats - 1)) : 0.0;
    std::sort(errors.begin(), errors.end());
    const double median = repeats % 2 == 1
                              ? errors[repeats / 2]
                              : 0.5 * (errors[repeats / 2 - 1] + errors[repeats / 2]);
    study.summary.push_back({ns[i], mean, sd, median});
  }
  return study;
}

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "n,repeat,estimate,abs_error\n";
  for (const auto& row : study.rows) {
    out << row.n << ',' << row.repeat << ',' << format_double(row.estimate) << ','
        << format_double(row.abs_error) << '\n';
  }
}

}  // namespace cptdp
