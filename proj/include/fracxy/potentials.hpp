#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fracxy/error.hpp"

namespace fracxy {

/// Base well profile f. Both choices are even, 2pi-periodic, vanish exactly on
/// 2piZ, dominate 1 - cos t and behave like t^2/2 at the origin.
enum class BaseProfile {
  one_minus_cos,  // f(t) = 1 - cos t
  stiffened,      // f(t) = (1 - cos t) + (1 - cos t)^2 / 4
};

std::string to_string(BaseProfile base);
BaseProfile base_profile_from_string(const std::string& name);

struct PotentialSpec {
  int n = 1;              // wells per period
  double epsilon = 0.01;  // truncation level of the secondary wells
  BaseProfile base = BaseProfile::one_minus_cos;
};

/// Throws Errc::construction unless n >= 1 and 0 < epsilon < f(pi).
void validate(const PotentialSpec& spec);

namespace detail {

template <typename Scalar>
Scalar two_pi() {
  return Scalar(2) * std::numbers::pi_v<Scalar>;
}

/// t reduced to [-pi, pi].
template <typename Scalar>
Scalar reduce_angle(Scalar t) {
  using std::remainder;
  return remainder(t, two_pi<Scalar>());
}

}  // namespace detail

template <typename Scalar>
Scalar eval_base(BaseProfile base, Scalar t) {
  using std::sin;
  // 2 sin^2(t/2) avoids the cancellation in 1 - cos t for small t
  const Scalar s = sin(Scalar(0.5) * t);
  const Scalar omc = Scalar(2) * s * s;
  switch (base) {
    case BaseProfile::one_minus_cos: return omc;
    case BaseProfile::stiffened: return omc + Scalar(0.25) * omc * omc;
  }
  return omc;
}

template <typename Scalar>
Scalar eval_base_derivative(BaseProfile base, Scalar t) {
  using std::sin;
  const Scalar st = sin(t);
  switch (base) {
    case BaseProfile::one_minus_cos: return st;
    case BaseProfile::stiffened: {
      const Scalar s = sin(Scalar(0.5) * t);
      return st * (Scalar(1) + s * s);  // f' = sin t + (1 - cos t) sin t / 2
    }
  }
  return st;
}

template <typename Scalar>
Scalar eval_base(const PotentialSpec& spec, Scalar t) {
  return eval_base(spec.base, t);
}

/// f_eps^(n)(t): f(n t) inside the main band dist(t, 2piZ) <= pi/n, and
/// max(f(n t), eps) on the secondary bands.
template <typename Scalar>
Scalar eval_fn_eps(const PotentialSpec& spec, Scalar t) {
  using std::abs;
  const Scalar r = detail::reduce_angle(t);
  const Scalar value = eval_base(spec.base, Scalar(spec.n) * r);
  if (abs(r) <= std::numbers::pi_v<Scalar> / Scalar(spec.n)) return value;
  return value > Scalar(spec.epsilon) ? value : Scalar(spec.epsilon);
}

/// True when t sits on the flat part of a secondary well.
template <typename Scalar>
bool on_plateau(const PotentialSpec& spec, Scalar t) {
  using std::abs;
  const Scalar r = detail::reduce_angle(t);
  if (abs(r) <= std::numbers::pi_v<Scalar> / Scalar(spec.n)) return false;
  return eval_base(spec.base, Scalar(spec.n) * r) < Scalar(spec.epsilon);
}

/// A subgradient of f_eps^(n). On kinks the value of the smooth branch is
/// returned (the side facing the main well).
template <typename Scalar>
Scalar subgradient_fn_eps(const PotentialSpec& spec, Scalar t) {
  if (on_plateau(spec, t)) return Scalar(0);
  const Scalar r = detail::reduce_angle(t);
  return Scalar(spec.n) * eval_base_derivative(spec.base, Scalar(spec.n) * r);
}

/// Value and subgradient together, sharing one reduction and one sin/cos.
template <typename Scalar>
Scalar eval_fn_eps_slope(const PotentialSpec& spec, Scalar t, Scalar& slope) {
  using std::abs;
  using std::cos;
  using std::sin;
  const Scalar n = Scalar(spec.n);
  const Scalar r = detail::reduce_angle(t);
  const Scalar half = Scalar(0.5) * n * r;
  const Scalar s = sin(half);
  const Scalar c = cos(half);
  const Scalar omc = Scalar(2) * s * s;
  const Scalar sn = Scalar(2) * s * c;  // sin(n r)
  Scalar value = omc;
  Scalar deriv = sn;
  if (spec.base == BaseProfile::stiffened) {
    value = omc + Scalar(0.25) * omc * omc;
    deriv = sn * (Scalar(1) + s * s);
  }
  if (abs(r) > std::numbers::pi_v<Scalar> / n && value < Scalar(spec.epsilon)) {
    slope = Scalar(0);
    return Scalar(spec.epsilon);
  }
  slope = n * deriv;
  return value;
}

}  // namespace fracxy
