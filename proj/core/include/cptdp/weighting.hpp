#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cptdp {

/// Slack allowed on probability-valued inputs and on mass sums.
inline constexpr double kProbabilityTolerance = 1e-12;

/// A probability weighting function: a continuous, monotone non-decreasing
/// map of [0, 1] onto [0, 1] with w(0) = 0 and w(1) = 1.
///
/// Instances are immutable and validated on construction; the only way to
/// obtain an invalid one is `tabulated_unchecked`, which exists so that the
/// monotonicity diagnostics can be shown to detect a broken weighting.
class WeightingFunction {
 public:
  struct Identity {};

  /// p^d / (p^d + (1 - p)^d)^(1/d). Reduces to the identity at d = 1.
  struct TverskyKahneman {
    double delta;
  };

  struct Knot {
    double p;
    double w;
  };

  /// Piecewise-linear interpolation through ascending knots.
  struct Tabulated {
    std::vector<Knot> knots;
  };

  using Family = std::variant<Identity, TverskyKahneman, Tabulated>;

  WeightingFunction() = default;

  static WeightingFunction identity();

  /// Throws std::invalid_argument when delta is not positive or when the
  /// resulting curve fails to be monotone (TK is monotone only for delta
  /// above roughly 0.279).
  static WeightingFunction tversky_kahneman(double delta);

  /// Knots must start at (0, 0), end at (1, 1), have strictly increasing p
  /// and non-decreasing w.
  static WeightingFunction tabulated(std::vector<Knot> knots);

  /// No monotonicity or endpoint checks. Test fixtures only.
  static WeightingFunction tabulated_unchecked(std::vector<Knot> knots);

  /// w(p). Inputs within kProbabilityTolerance of [0, 1] are clamped; others
  /// raise std::domain_error.
  double operator()(double p) const;

  const Family& family() const { return family_; }
  bool is_identity() const;
  bool is_checked() const { return checked_; }

  /// Smallest xi with w(p) <= xi * p on (0, 1], or nullopt when w(p)/p is
  /// unbounded near zero.
  std::optional<double> linear_bound() const;

  std::string describe() const;

 private:
  explicit WeightingFunction(Family family, bool checked = true)
      : family_(std::move(family)), checked_(checked) {}

  Family family_ = Identity{};
  bool checked_ = true;
};

double weight_eval(const WeightingFunction& w, double p);

}  // namespace cptdp
