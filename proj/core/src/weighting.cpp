#include "cptdp/weighting.hpp"

#include "overloaded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cptdp {

namespace {

using detail::Overloaded;

double tk_eval(double delta, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double a = std::pow(p, delta);
  const double b = std::pow(1.0 - p, delta);
  return a / std::pow(a + b, 1.0 / delta);
}

double tabulated_eval(const std::vector<WeightingFunction::Knot>& knots, double p) {
  auto upper = std::upper_bound(knots.begin(), knots.end(), p,
                                [](double v, const auto& k) { return v < k.p; });
  if (upper == knots.begin()) return knots.front().w;
  if (upper == knots.end()) return knots.back().w;
  const auto& hi = *upper;
  const auto& lo = *(upper - 1);
  const double t = (p - lo.p) / (hi.p - lo.p);
  return lo.w + t * (hi.w - lo.w);
}

// Dense grid scan; TK curves that lose monotonicity do so over a wide band of
// p, so a 4096-cell grid is ample.
bool tk_is_monotone(double delta) {
  constexpr int kCells = 4096;
  double prev = 0.0;
  for (int i = 1; i <= kCells; ++i) {
    const double w = tk_eval(delta, static_cast<double>(i) / kCells);
    if (w < prev) return false;
    prev = w;
  }
  return true;
}

}  // namespace

WeightingFunction WeightingFunction::identity() { return WeightingFunction(Identity{}); }

WeightingFunction WeightingFunction::tversky_kahneman(double delta) {
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw std::invalid_argument("tversky_kahneman: delta must be a positive finite number");
  }
  if (!tk_is_monotone(delta)) {
    std::ostringstream msg;
    msg << "tversky_kahneman: delta = " << delta
        << " yields a non-monotone weighting (requires delta above ~0.279)";
    throw std::invalid_argument(msg.str());
  }
  return WeightingFunction(TverskyKahneman{delta});
}

WeightingFunction WeightingFunction::tabulated(std::vector<Knot> knots) {
  if (knots.size() < 2) {
    throw std::invalid_argument("tabulated weighting: at least two knots required");
  }
  for (const auto& k : knots) {
    if (!std::isfinite(k.p) || !std::isfinite(k.w)) {
      throw std::invalid_argument("tabulated weighting: non-finite knot");
    }
  }
  if (knots.front().p != 0.0 || knots.front().w != 0.0) {
    throw std::invalid_argument("tabulated weighting: first knot must be (0, 0)");
  }
  if (knots.back().p != 1.0 || knots.back().w != 1.0) {
    throw std::invalid_argument("tabulated weighting: last knot must be (1, 1)");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].p > knots[i - 1].p)) {
      throw std::invalid_argument("tabulated weighting: knot probabilities must strictly increase");
    }
    if (knots[i].w < knots[i - 1].w) {
      std::ostringstream msg;
      msg << "tabulated weighting: not monotone at knot " << i << " (p = " << knots[i].p << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  return WeightingFunction(Tabulated{std::move(knots)});
}

WeightingFunction WeightingFunction::tabulated_unchecked(std::vector<Knot> knots) {
  if (knots.size() < 2) {
    throw std::invalid_argument("tabulated weighting: at least two knots required");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].p > knots[i - 1].p)) {
      throw std::invalid_argument("tabulated weighting: knot probabilities must strictly increase");
    }
  }
  return WeightingFunction(Tabulated{std::move(knots)}, /*checked=*/false);
}

double WeightingFunction::operator()(double p) const {
  if (!(p >= -kProbabilityTolerance && p <= 1.0 + kProbabilityTolerance)) {
    std::ostringstream msg;
    msg << "weighting function evaluated outside [0, 1]: p = " << p;
    throw std::domain_error(msg.str());
  }
  p = std::clamp(p, 0.0, 1.0);
  const double w = std::visit(
      Overloaded{
          [&](const Identity&) { return p; },
          [&](const TverskyKahneman& tk) { return tk_eval(tk.delta, p); },
          [&](const Tabulated& t) { return tabulated_eval(t.knots, p); },
      },
      family_);
  if (!checked_) return w;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return std::clamp(w, 0.0, 1.0);
}

bool WeightingFunction::is_identity() const {
  if (std::holds_alternative<Identity>(family_)) return true;
  if (const auto* tk = std::get_if<TverskyKahneman>(&family_)) return tk->delta == 1.0;
  return false;
}

std::optional<double> WeightingFunction::linear_bound() const {
  return std::visit(
      Overloaded{
          [](const Identity&) -> std::optional<double> { return 1.0; },
          [](const TverskyKahneman& tk) -> std::optional<double> {
            if (tk.delta < 1.0) return std::nullopt;
            if (tk.delta == 1.0) return 1.0;
            // w(p)/p -> 0 as p -> 0 for delta > 1; the supremum is interior or at
            // p = 1. Grid scan then golden refinement around the best cell.
            constexpr int kCells = 4096;
            double best_p = 1.0;
            double best = 1.0;
            for (int i = 1; i <= kCells; ++i) {
              const double p = static_cast<double>(i) / kCells;
              const double r = tk_eval(tk.delta, p) / p;
              if (r > best) {
                best = r;
                best_p = p;
              }
            }
            double lo = std::max(best_p - 1.0 / kCells, 1e-12);
            double hi = std::min(best_p + 1.0 / kCells, 1.0);
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            auto ratio = [&](double p) { return tk_eval(tk.delta, p) / p; };
            for (int it = 0; it < 80; ++it) {
              const double a = hi - g * (hi - lo);
              const double b = lo + g * (hi - lo);
              if (ratio(a) > ratio(b)) {
                hi = b;
              } else {
                lo = a;
              }
            }
            return std::max(best, ratio(0.5 * (lo + hi)));
          },
          [](const Tabulated& t) -> std::optional<double> {
            // w(p)/p is monotone on each linear piece, so the supremum sits at a
            // knot or at the right-limit p -> 0+, which is the first slope.
            const auto& k = t.knots;
            double best = (k[1].w - k[0].w) / (k[1].p - k[0].p);
            if (k[0].p > 0.0) best = k[0].w / k[0].p;
            for (const auto& knot : k) {
              if (knot.p > 0.0) best = std::max(best, knot.w / knot.p);
            }
            return best;
          },
      },
      family_);
}

std::string WeightingFunction::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const Identity&) { out << "identity"; },
                 [&](const TverskyKahneman& tk) { out << "tversky_kahneman(delta=" << tk.delta << ")"; },
                 [&](const Tabulated& t) { out << "tabulated(" << t.knots.size() << " knots)"; },
             },
             family_);
  if (!checked_) out << " [unchecked]";
  return out.str();
}

double weight_eval(const WeightingFunction& w, double p) { return w(p); }

}  // namespace cptdp
