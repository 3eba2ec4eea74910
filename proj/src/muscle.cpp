#include "musco/muscle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace musco {

namespace {

Scalar poly_eval(const std::array<Scalar, 6>& c, Scalar s) {
  Scalar acc = 0.0;
  for (int k = 5; k >= 0; --k) acc = acc * s + c[k];
  return acc;
}

Scalar poly_deriv_eval(const std::array<Scalar, 6>& c, Scalar s) {
  Scalar acc = 0.0;
  for (int k = 5; k >= 1; --k) acc = acc * s + k * c[k];
  return acc;
}

}  // namespace

TendonCurve TendonCurve::tabulated() {
  TendonCurve curve;
  curve.quintic = {-229806913.40, 567666340.97, -560875494.46,
                   277072371.99,  -68434261.19, 6760794.14};
  curve.origin = 0.0;
  return curve;
}

TendonCurve TendonCurve::refit() { return tendon_force_refit(2.0, 2.04, 0.5, 19.2308); }

TendonCurve tendon_force_refit(Scalar slack_end, Scalar toe_end,
                               Scalar linear_offset, Scalar linear_slope) {
  if (!(toe_end > slack_end)) {
    throw std::invalid_argument("tendon_force_refit: toe_end must exceed slack_end");
  }
  const Scalar d = toe_end - slack_end;

  // Zero value/slope/curvature at slack_end leave only the cubic..quintic terms
  // of the shifted polynomial. The three toe_end conditions, scaled by powers of
  // d for conditioning, determine them uniquely.
  Eigen::Matrix3d M;
  M << 1, 1, 1,
       3, 4, 5,
       3, 6, 10;
  Eigen::Vector3d rhs(linear_offset, linear_slope * d, 0.0);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
  if (!lu.isInvertible()) {
    throw std::runtime_error("tendon_force_refit: singular boundary-condition system");
  }
  const Eigen::Vector3d scaled = lu.solve(rhs);

  TendonCurve curve;
  curve.slack_end = slack_end;
  curve.toe_end = toe_end;
  curve.linear_offset = linear_offset;
  curve.linear_slope = linear_slope;
  curve.origin = slack_end;
  curve.quintic = {0.0, 0.0, 0.0,
                   scaled[0] / (d * d * d),
                   scaled[1] / (d * d * d * d),
                   scaled[2] / (d * d * d * d * d)};
  return curve;
}

Scalar tendon_force(Scalar L_S, const TendonCurve& curve) {
  if (L_S < curve.slack_end) return 0.0;
  if (L_S < curve.toe_end) return poly_eval(curve.quintic, L_S - curve.origin);
  return curve.linear_offset + curve.linear_slope * (L_S - curve.toe_end);
}

Scalar tendon_force_derivative(Scalar L_S, const TendonCurve& curve) {
  if (L_S < curve.slack_end) return 0.0;
  if (L_S < curve.toe_end) return poly_deriv_eval(curve.quintic, L_S - curve.origin);
  return curve.linear_slope;
}

Scalar tendon_force_inverse(Scalar F, const TendonCurve& curve) {
  if (F < 0.0) throw std::domain_error("tendon_force_inverse: negative force");
  if (F == 0.0) return curve.slack_end;
  if (F >= curve.linear_offset) {
    return curve.toe_end + (F - curve.linear_offset) / curve.linear_slope;
  }
  // Toe region: bisection on the monotone quintic branch.
  Scalar lo = curve.slack_end;
  Scalar hi = curve.toe_end;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const Scalar mid = 0.5 * (lo + hi);
    if (tendon_force(mid, curve) < F) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Scalar parallel_force(Scalar L_C) {
  if (L_C < 1.0) return 0.0;
  return ((8.0 * L_C - 24.0) * L_C + 24.0) * L_C - 8.0;
}

Scalar force_length(Scalar L_C, const MuscleParams& params) {
  const Scalar t = (L_C - 1.0) / params.W;
  return std::exp(-t * t);
}

Scalar hill_velocity(Scalar z, const MuscleParams& params) {
  if (z < 0.0) throw std::domain_error("hill_velocity: force ratio z must be nonnegative");
  if (z >= params.g_max) throw std::domain_error("hill_velocity: z at or beyond the g_max pole");
  if (z <= 1.0) return (1.0 - z) / (1.0 + z / params.A);
  return -params.A * (z - 1.0) * (params.g_max - 1.0) /
         ((params.A + 1.0) * (params.g_max - z));
}

Scalar hill_velocity_inverse(Scalar u, const MuscleParams& params) {
  if (u > 1.0) throw std::domain_error("hill_velocity_inverse: u beyond shortening limit 1");
  if (u >= 0.0) return params.A * (1.0 - u) / (params.A + u);
  // Eccentric branch, solved in closed form; approaches g_max as u -> -inf.
  const Scalar k = params.A * (params.g_max - 1.0);
  const Scalar c = (params.A + 1.0) * u;
  return (k - c * params.g_max) / (k - c);
}

Activation activation_from(Scalar u, Scalar L_S, Scalar L_C, const MuscleParams& params) {
  const Scalar z = hill_velocity_inverse(u, params);
  if (z == 0.0) throw std::domain_error("activation_from: singular at u = 1 (z = 0)");
  Activation act;
  act.ill_conditioned = std::abs(z) < 1e-9;
  const Scalar f = force_length(L_C, params);
  act.raw = (tendon_force(L_S, params.tendon) - parallel_force(L_C)) / (z * f);
  act.clamped = std::clamp(act.raw, 0.0, 1.0);
  return act;
}

}  // namespace musco
