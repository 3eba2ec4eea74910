#pragma once

#include <string>
#include <vector>

#include "musco/plant.hpp"
#include "musco/types.hpp"

namespace musco {

/// Reference position, velocity, and acceleration at one instant.
struct Reference {
  Scalar r = 0.0;
  Scalar r_dot = 0.0;
  Scalar r_ddot = 0.0;
};

/// Reference trajectory family: constant, offset + amplitude*sin(omega*tau),
/// or a sampled table interpolated with a natural cubic spline (clamped to the
/// table span, endpoints held with zero derivatives outside it).
struct ReferenceSpec {
  enum class Kind { Constant, Sinusoid, Table };
  Kind kind = Kind::Sinusoid;
  Scalar offset = 2.6315;
  Scalar amplitude = 0.01;
  Scalar omega = 0.5;
  std::vector<Scalar> table_tau;     ///< strictly increasing knots
  std::vector<Scalar> table_value;
  std::vector<Scalar> table_second;  ///< spline second derivatives (built)
};

/// Builds a table reference; computes the natural-spline second derivatives.
/// Throws std::invalid_argument for fewer than 2 knots or non-increasing taus.
ReferenceSpec table_reference(std::vector<Scalar> tau, std::vector<Scalar> value);

Reference reference_eval(Scalar tau, const ReferenceSpec& spec);

/// Backstepping gains. The error system is e_dot = A e + B zeta with
/// A = [[0,1],[0,0]], B = [0; 1/m]; K must make A - B K Hurwitz.
struct ControllerGains {
  RowVec2 K{0.5774, 1.2198};
  Mat2 P{{21.1284, 17.3205}, {17.3205, 36.5955}};
  Scalar gamma = 1.0;
  /// Include the disturbance-rate feedforward term in the force-rate command.
  bool delta_dot_feedforward = true;
};

/// Gain invariants; returns human-readable violations (empty when valid):
/// P symmetric positive definite, A_cl = A - B K Hurwitz, and the implied
/// Q = -(A_cl' P + P A_cl) positive definite.
std::vector<std::string> validate(const ControllerGains& gains, Scalar m);

/// Closed-loop matrix A - B K for the configured mass.
Mat2 closed_loop_matrix(const ControllerGains& gains, Scalar m);

struct ControlResult {
  VirtualInput u;            ///< allocated (and possibly clamped) inputs
  Scalar beta = 0.0;         ///< commanded tendon force-rate combination
  Scalar allocation = 0.0;   ///< Phi_S1'^2 + Phi_S2'^2 at the current lengths
  bool clamped_u1 = false;
  bool clamped_u2 = false;
};

inline constexpr Scalar kAllocationEpsilon = 1e-6;

/// Backstepping tracking controller. Computes the force-rate command beta from
/// the tracking error, backstepping variable and feedforward terms, then
/// resolves the 1x2 allocation with the minimum-norm (least-squares) solution
///   u1 = -Phi_S1'/alloc * beta,  u2 = +Phi_S2'/alloc * beta,
/// clamped to |u_j| <= u_max_j. Throws std::runtime_error when both tendons
/// are slack (allocation <= kAllocationEpsilon).
ControlResult control(const PlantState& state, const Reference& ref,
                      const Uncertainty& unc, const ControllerGains& gains,
                      const MuscleParams& params, Scalar u1_max = 2.0,
                      Scalar u2_max = 2.0);

/// Augmented Lyapunov value 0.5 e'P e + 0.5 w^2 of the tracking error system,
/// with w = zeta + K e; used by the descent diagnostics.
Scalar lyapunov_value(const PlantState& state, const Reference& ref,
                      const Uncertainty& unc, const ControllerGains& gains,
                      const MuscleParams& params);

/// ||e|| + |w|, the activity measure used to window the descent check.
Scalar error_activity(const PlantState& state, const Reference& ref,
                      const Uncertainty& unc, const ControllerGains& gains,
                      const MuscleParams& params);

}  // namespace musco
