#pragma once

#include <utility>

#include "musco/muscle.hpp"
#include "musco/types.hpp"

namespace musco {

/// Four-state dual-muscle plant: mass position/velocity plus the two
/// series-elastic lengths. Contractile lengths are derived through the total
/// length constraint.
struct PlantState {
  Scalar x1 = 0.0;  ///< mass position (= total length of muscle 1)
  Scalar x2 = 0.0;  ///< mass velocity
  Scalar x3 = 0.0;  ///< series-elastic length, muscle 1
  Scalar x4 = 0.0;  ///< series-elastic length, muscle 2

  Vec4 vec() const { return Vec4(x1, x2, x3, x4); }
  static PlantState from(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// Contraction velocities of the two contractile elements, used as the
/// plant's (virtual) control inputs.
struct VirtualInput {
  Scalar u1 = 0.0;
  Scalar u2 = 0.0;
};

/// Matched acceleration disturbance and its rate (the rate is available to the
/// controller only, never to the observers).
struct Uncertainty {
  Scalar delta = 0.0;
  Scalar delta_dot = 0.0;
};

/// Measured outputs: mass position and the two tendon forces.
struct Measurement {
  Scalar y1 = 0.0;
  Scalar y2 = 0.0;
  Scalar y3 = 0.0;
};

/// Contractile lengths must stay above this floor during simulation; below it
/// the model leaves its physical domain and the run halts.
inline constexpr Scalar kContractileGuard = 0.05;

/// Plant derivative field. Throws std::runtime_error naming the violated guard
/// when a contractile length is at or below kContractileGuard.
PlantState derivatives(const PlantState& state, const VirtualInput& input,
                       Scalar delta, const MuscleParams& params);

/// Output map: (x1, tendon force of x3, tendon force of x4).
Measurement measure(const PlantState& state, const MuscleParams& params);

/// (L_C1, L_C2) from the length constraint: x1 - x3 and (C - x1) - x4.
std::pair<Scalar, Scalar> contractile_lengths(const PlantState& state,
                                              const MuscleParams& params);

/// Time derivatives of the contractile lengths, (-u1, -u2).
std::pair<Scalar, Scalar> contractile_derivatives(const PlantState& state,
                                                  const VirtualInput& input);

/// Jacobian of the stacked output-and-output-rate map [y; dy/dt] with respect
/// to the state, by central finite differences. The output rate itself is a
/// directional difference along the plant field.
Eigen::Matrix<Scalar, 6, 4> observability_jacobian(const PlantState& state,
                                                   const VirtualInput& input,
                                                   const MuscleParams& params,
                                                   Scalar perturbation = 1e-6);

/// Numeric rank of observability_jacobian (singular values above 1e-6 of the
/// largest). 4 means locally observable; slack tendons drop it below 4.
int observability_rank(const PlantState& state, const VirtualInput& input,
                       const MuscleParams& params, Scalar perturbation = 1e-6);

/// True when x3 or x4 sits within `margin` of a tendon-curve breakpoint, where
/// the finite-difference rank is ill-conditioned.
bool near_tendon_breakpoint(const PlantState& state, const TendonCurve& curve,
                            Scalar margin);

}  // namespace musco
