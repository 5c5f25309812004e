#include "cptdp/cpt_value.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace cptdp {

namespace {

struct Level {
  double y;     // utility of the deviation magnitude
  double mass;
};

// One side (gains or losses) of the functional: its levels plus the mass
// that lies outside the side, needed to form tails near 1 accurately.
struct Side {
  std::vector<Level> levels;
  double outside = 0.0;  // mass of atoms that are not on this side
  double total = 1.0;    // total mass of the law
};

// P(Y >= y_j) for every (sorted, distinct) level. Small tails are summed from
// the top; tails above 1/2 are formed as total - mass below, so a proper law
// whose mass is all on one side gets a tail of exactly 1. The slope of w can
// be unbounded at 1, where a one-ulp error would be amplified.
std::vector<double> tails(const Side& side) {
  const auto& lv = side.levels;
  std::vector<double> top(lv.size());
  double acc = 0.0;
  for (std::size_t j = lv.size(); j-- > 0;) {
    acc += lv[j].mass;
    top[j] = acc;
  }
  double below = side.outside;
  for (std::size_t j = 0; j < lv.size(); ++j) {
    if (top[j] > 0.5) top[j] = side.total - below;
    top[j] = std::clamp(top[j], 0.0, 1.0);
    below += lv[j].mass;
  }
  return top;
}

void normalize(Side& side) {
  auto& levels = side.levels;
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.y < b.y; });
  // Equal levels are combined first so that splitting an atom cannot change
  // the tails that reach w.
  std::size_t out = 0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (out > 0 && levels[out - 1].y == levels[j].y) {
      levels[out - 1].mass += levels[j].mass;
    } else {
      levels[out++] = levels[j];
    }
  }
  levels.resize(out);
}

// Integral over [0, inf) of w(P(Y > x)) for a discrete non-negative Y. On
// [y_{j-1}, y_j) the tail equals P(Y >= y_j), so the integral is a finite sum.
double staircase(const Side& side, const WeightingFunction& w) {
  const auto tail = tails(side);
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < side.levels.size(); ++j) {
    const double width = side.levels[j].y - prev;
    if (width > 0.0) sum += width * w(tail[j]);
    prev = side.levels[j].y;
  }
  return sum;
}

void split_levels(const DiscreteDistribution& dist, const CptSpec& spec, Side& gains, Side& losses) {
  const double total = dist.is_proper() ? 1.0 : dist.total_mass();
  gains.total = losses.total = total;
  for (const Atom& a : dist.atoms()) {
    if (a.mass == 0.0) continue;
    const double d = a.value - spec.reference_point;
    if (d > 0.0) {
      gains.levels.push_back({spec.u_plus(d), a.mass});
      losses.outside += a.mass;
    } else if (d < 0.0) {
      losses.levels.push_back({spec.u_minus(-d), a.mass});
      gains.outside += a.mass;
    } else {
      gains.outside += a.mass;
      losses.outside += a.mass;
    }
  }
  for (const Side* side : {&gains, &losses}) {
    for (const Level& l : side->levels) {
      if (!std::isfinite(l.y)) throw std::domain_error("cpt: utility evaluation is not finite");
    }
  }
  normalize(gains);
  normalize(losses);
}

}  // namespace

CptParts cpt_parts(const DiscreteDistribution& dist, const CptSpec& spec) {
  Side gains;
  Side losses;
  split_levels(dist, spec, gains, losses);
  return {staircase(gains, spec.w_plus), staircase(losses, spec.w_minus)};
}

double cpt_value_exact(const DiscreteDistribution& dist, const CptSpec& spec) {
  if (!dist.is_proper()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "cpt_value_exact: law has total mass " << dist.total_mass()
        << "; sub-normalized laws go through cpt_value_subnormalized";
    throw std::invalid_argument(msg.str());
  }
  return cpt_parts(dist, spec).value();
}

double cpt_value_subnormalized(const DiscreteDistribution& dist, const CptSpec& spec) {
  if (dist.total_mass() > 1.0 + kProbabilityTolerance) {
    throw std::invalid_argument("cpt_value_subnormalized: total mass exceeds 1");
  }
  return cpt_parts(dist, spec).value();
}

double cpt_value_quadrature(const DiscreteDistribution& dist, const CptSpec& spec, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("cpt_value_quadrature: tol must be positive");
  if (!dist.is_proper()) throw std::invalid_argument("cpt_value_quadrature: law must be proper");

  Side gains;
  Side losses;
  split_levels(dist, spec, gains, losses);

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
  constexpr unsigned kMaxDepth = 20;

  // Each side gets half the budget, split evenly over its panels.
  // The integrand is evaluated from scratch at every node; only the tail
  // formation near 1 is shared with the staircase.
  auto integrate_side = [&](const Side& side, const WeightingFunction& w) {
    const auto& levels = side.levels;
    if (levels.empty()) return 0.0;
    std::vector<double> cuts{0.0};
    for (const Level& l : levels) cuts.push_back(l.y);

    auto integrand = [&](double x) {
      double tail = 0.0;
      double below = side.outside;
      for (const Level& l : levels) {
        if (l.y > x) {
          tail += l.mass;
        } else {
          below += l.mass;
        }
      }
      if (tail > 0.5) tail = side.total - below;
      return w(std::clamp(tail, 0.0, 1.0));
    };

    const double panel_tol = 0.5 * tol / static_cast<double>(cuts.size());
    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      const double a = cuts[i - 1];
      const double b = cuts[i];
      double err = 0.0;
      const double width = b - a;
      const double rel = std::max(panel_tol / std::max(width, 1e-300), 1e-15);
      const double piece = Quadrature::integrate(integrand, a, b, kMaxDepth, rel, &err);
      if (!(err <= panel_tol) || !std::isfinite(piece)) {
        std::ostringstream msg;
        msg << "cpt_value_quadrature: panel [" << a << ", " << b << "] error estimate " << err
            << " exceeds " << panel_tol;
        throw ConvergenceError(msg.str());
      }
      total += piece;
    }
    return total;
  };

  return integrate_side(gains, spec.w_plus) - integrate_side(losses, spec.w_minus);
}

}  // namespace cptdp
