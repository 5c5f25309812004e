#pragma once

#include <memory>
#include <string>
#include <variant>

namespace cptdp {

/// Utility applied to gain or loss magnitudes: a map [0, inf) -> [0, inf)
/// with u(0) = 0, monotone non-decreasing, with closed-form derivative and
/// inverse.
class UtilityFunction {
 public:
  struct Identity {};

  /// x^exponent with exponent in (0, 1].
  struct Power {
    double exponent;
  };

  /// factor * base(x) with factor > 0.
  struct Scaled {
    std::shared_ptr<const UtilityFunction> base;
    double factor;
  };

  using Family = std::variant<Identity, Power, Scaled>;

  UtilityFunction() = default;

  static UtilityFunction identity();
  static UtilityFunction power(double exponent);
  static UtilityFunction scaled(UtilityFunction base, double factor);

  double operator()(double x) const;

  /// u'(x). Power with exponent < 1 returns +inf at x = 0.
  double derivative(double x) const;

  /// u^{-1}(y) on the range of u.
  double inverse(double y) const;

  /// True when u'(0) is finite; false only for Power with exponent < 1
  /// (possibly under a Scaled wrapper).
  bool has_bounded_derivative() const;

  /// True when u is linear, i.e. a positive multiple of the identity.
  bool is_linear() const;
  bool is_identity() const;

  const Family& family() const { return family_; }
  std::string describe() const;

 private:
  explicit UtilityFunction(Family family) : family_(std::move(family)) {}

  Family family_ = Identity{};
};

double utility_derivative(const UtilityFunction& u, double x);
double utility_inverse(const UtilityFunction& u, double y);

}  // namespace cptdp
