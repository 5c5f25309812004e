#include "cptdp/utility.hpp"

#include "overloaded.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cptdp {

namespace {

using detail::Overloaded;

void require_non_negative(double x, const char* what) {
  if (!(x >= 0.0)) {
    std::ostringstream msg;
    msg << what << ": argument must be non-negative, got " << x;
    throw std::domain_error(msg.str());
  }
}

}  // namespace

UtilityFunction UtilityFunction::identity() { return UtilityFunction(Identity{}); }

UtilityFunction UtilityFunction::power(double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw std::invalid_argument("power utility: exponent must lie in (0, 1]");
  }
  return UtilityFunction(Power{exponent});
}

UtilityFunction UtilityFunction::scaled(UtilityFunction base, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scaled utility: factor must be positive and finite");
  }
  return UtilityFunction(Scaled{std::make_shared<const UtilityFunction>(std::move(base)), factor});
}

double UtilityFunction::operator()(double x) const {
  require_non_negative(x, "utility");
  return std::visit(Overloaded{
                        [&](const Identity&) { return x; },
                        [&](const Power& p) { return p.exponent == 1.0 ? x : std::pow(x, p.exponent); },
                        [&](const Scaled& s) { return s.factor * (*s.base)(x); },
                    },
                    family_);
}

double UtilityFunction::derivative(double x) const {
  require_non_negative(x, "utility derivative");
  return std::visit(Overloaded{
                        [&](const Identity&) { return 1.0; },
                        [&](const Power& p) {
                          if (p.exponent == 1.0) return 1.0;
                          if (x == 0.0) return std::numeric_limits<double>::infinity();
                          return p.exponent * std::pow(x, p.exponent - 1.0);
                        },
                        [&](const Scaled& s) { return s.factor * s.base->derivative(x); },
                    },
                    family_);
}

double UtilityFunction::inverse(double y) const {
  require_non_negative(y, "utility inverse");
  return std::visit(Overloaded{
                        [&](const Identity&) { return y; },
                        [&](const Power& p) { return p.exponent == 1.0 ? y : std::pow(y, 1.0 / p.exponent); },
                        [&](const Scaled& s) { return s.base->inverse(y / s.factor); },
                    },
                    family_);
}

bool UtilityFunction::has_bounded_derivative() const {
  return std::visit(Overloaded{
                        [](const Identity&) { return true; },
                        [](const Power& p) { return p.exponent == 1.0; },
                        [](const Scaled& s) { return s.base->has_bounded_derivative(); },
                    },
                    family_);
}

bool UtilityFunction::is_linear() const { return has_bounded_derivative(); }

bool UtilityFunction::is_identity() const {
  return std::visit(Overloaded{
                        [](const Identity&) { return true; },
                        [](const Power& p) { return p.exponent == 1.0; },
                        [](const Scaled& s) { return s.factor == 1.0 && s.base->is_identity(); },
                    },
                    family_);
}

std::string UtilityFunction::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const Identity&) { out << "identity"; },
                 [&](const Power& p) { out << "power(exponent=" << p.exponent << ")"; },
                 [&](const Scaled& s) { out << s.factor << "*" << s.base->describe(); },
             },
             family_);
  return out.str();
}

double utility_derivative(const UtilityFunction& u, double x) { return u.derivative(x); }
double utility_inverse(const UtilityFunction& u, double y) { return u.inverse(y); }

}  // namespace cptdp
