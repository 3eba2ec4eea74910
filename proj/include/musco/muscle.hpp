#pragma once

#include <array>

#include "musco/types.hpp"

namespace musco {

/// Series-elastic (tendon) force-length curve: zero below the slack length,
/// a quintic toe region, then linear. All lengths and forces are normalized.
struct TendonCurve {
  Scalar slack_end = 2.0;       ///< length where force begins
  Scalar toe_end = 2.04;        ///< end of the quintic toe region
  std::array<Scalar, 6> quintic{};  ///< toe polynomial, ascending powers of (L - origin)
  Scalar origin = 0.0;          ///< evaluation shift of the toe polynomial
  Scalar linear_offset = 0.5;   ///< force at toe_end
  Scalar linear_slope = 19.2308;  ///< stiffness of the linear region

  /// Classic rounded coefficient set for the toe quintic (evaluated at L directly).
  /// Kept for fidelity comparisons; the rounded coefficients are only accurate to
  /// a few 1e-3 in force over the toe region.
  static TendonCurve tabulated();

  /// C2-exact curve from boundary conditions; see tendon_force_refit().
  static TendonCurve refit();
};

/// Rebuilds the toe quintic from six C2 boundary conditions: value, slope and
/// curvature are zero at slack_end; value = linear_offset, slope = linear_slope
/// and curvature = 0 at toe_end. The quintic is stored relative to slack_end.
/// Throws std::invalid_argument if toe_end <= slack_end and std::runtime_error
/// if the condition system is singular (unreachable for distinct endpoints).
TendonCurve tendon_force_refit(Scalar slack_end, Scalar toe_end,
                               Scalar linear_offset, Scalar linear_slope);

/// Physiological constants shared by both muscles. Everything is dimensionless.
struct MuscleParams {
  Scalar W = 0.3;       ///< width of the force-length Gaussian
  Scalar A = 0.25;      ///< Hill curvature constant
  Scalar g_max = 1.5;   ///< eccentric force plateau (pole of the velocity curve)
  Scalar C = 5.54;      ///< total length constant, L_m1 + L_m2 = C
  Scalar m = 1.0;       ///< load mass
  TendonCurve tendon = TendonCurve::refit();
};

/// Tendon force at series-elastic length L_S. Total: returns 0 below slack_end.
Scalar tendon_force(Scalar L_S, const TendonCurve& curve);

/// Analytic derivative dF/dL_S of the active branch. At a breakpoint the
/// right-hand branch is used (the curve is C2, so this matters only under
/// coefficient rounding).
Scalar tendon_force_derivative(Scalar L_S, const TendonCurve& curve);

/// Inverse of tendon_force. F = 0 maps to slack_end (the unique limit point of
/// positive-force preimages); the linear region inverts in closed form; the toe
/// region is solved by bisection to 1e-10 absolute. Throws std::domain_error
/// for F < 0 (corrupted force measurement; callers may clamp first).
Scalar tendon_force_inverse(Scalar F, const TendonCurve& curve);

/// Parallel-elastic force: 0 below normalized length 1, cubic above.
Scalar parallel_force(Scalar L_C);

/// Gaussian force-length factor exp(-((L_C-1)/W)^2), in (0, 1], peak at L_C = 1.
Scalar force_length(Scalar L_C, const MuscleParams& params);

/// Hill force-velocity curve: contraction velocity as a function of the force
/// ratio z. Positive (shortening) for z < 1, negative (lengthening) for z > 1.
/// Throws std::domain_error for z < 0 or z >= g_max (pole of the eccentric branch).
Scalar hill_velocity(Scalar z, const MuscleParams& params);

/// Analytic inverse of hill_velocity. Defined for u <= 1 (the curve's range is
/// (-inf, 1]); throws std::domain_error otherwise.
Scalar hill_velocity_inverse(Scalar u, const MuscleParams& params);

/// Activation recovered from a contraction velocity and the two element lengths.
struct Activation {
  Scalar raw = 0.0;      ///< (Phi_S - Phi_P) / (z f), unclamped
  Scalar clamped = 0.0;  ///< raw clamped to [0, 1]
  bool ill_conditioned = false;  ///< |z| fell below the conditioning threshold
};

/// Solves the force-balance relation for the activation signal:
///   a = (Phi_S(L_S) - Phi_P(L_C)) / (z f(L_C)),  z = hill_velocity_inverse(u).
/// Throws std::domain_error when z = 0 (u = 1) or when u is out of range;
/// |z| < 1e-9 is flagged as ill-conditioned instead.
Activation activation_from(Scalar u, Scalar L_S, Scalar L_C, const MuscleParams& params);

}  // namespace musco
