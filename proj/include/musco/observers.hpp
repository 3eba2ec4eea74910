#pragma once

#include <string>
#include <vector>

#include "musco/muscle.hpp"
#include "musco/plant.hpp"
#include "musco/types.hpp"

namespace musco {

/// Smooth sign approximation e / (width + |e|), in (-1, 1). Used inside every
/// observer right-hand side in place of the discontinuous sign, which keeps a
/// fixed-step integrator honest.
Scalar sign_approx(Scalar e, Scalar width);

/// True when all coefficients of s^n + c[0] s^(n-1) + ... + c[n-1] describe a
/// polynomial with all roots strictly in the open left half-plane (checked via
/// companion-matrix eigenvalues).
bool polynomial_hurwitz(const std::vector<Scalar>& monic_tail);

// ---------------------------------------------------------------------------
// High gain observer

struct HgoParams {
  Scalar eps_h = 0.1;  ///< gain parameter in (0, 1); smaller = faster but noisier
  Scalar h11 = 3.0, h12 = 3.0, h13 = 1.0;  ///< position/velocity/disturbance chain
  Scalar h21 = 2.0, h22 = 1.0;             ///< tendon-1 length/input chain
  Scalar h31 = 2.0, h32 = 1.0;             ///< tendon-2 length/input chain
};

struct HgoState {
  Scalar xhat1 = 0, xhat2 = 0, xhat3 = 0, xhat4 = 0;
  Scalar delta_hat = 0;
  Scalar uhat1 = 0, uhat2 = 0;

  static constexpr int kDim = 7;
  Eigen::Matrix<Scalar, kDim, 1> vec() const;
  static HgoState from(const Eigen::Matrix<Scalar, kDim, 1>& v);
};

std::vector<std::string> validate(const HgoParams& p);

/// Right-hand side of the high gain observer driven by the measurement alone.
/// Tendon lengths are recovered through the force-curve inverse.
HgoState hgo_derivatives(const HgoState& s, const Measurement& y,
                         const HgoParams& p, const MuscleParams& muscle);

// ---------------------------------------------------------------------------
// Sliding mode observer (super-twisting position loop + first-order length loops)

struct SmoParams {
  Scalar lambda11 = 28.17;  ///< super-twisting square-root gain
  Scalar alpha11 = 1.1;     ///< super-twisting switching gain (> f_plus)
  Scalar alpha2 = 1.1;      ///< tendon-1 switching gain (> U_1m)
  Scalar alpha3 = 1.0;      ///< tendon-2 switching gain (> U_2m)
  Scalar tau_s = 0.01;      ///< equivalent-injection filter time constant
  Scalar delta_s = 0.01;    ///< sign-approximation width
  Scalar f_plus = 1.0;      ///< assumed disturbance bound
  Scalar p = 0.5;           ///< convergence-margin constant in (0, 1)
};

struct SmoState {
  Scalar xhat1 = 0, xhat2 = 0, xhat3 = 0, xhat4 = 0;
  Scalar delta_hat = 0;  ///< low-pass filtered switching injection
  Scalar uhat1 = 0, uhat2 = 0;

  static constexpr int kDim = 7;
  Eigen::Matrix<Scalar, kDim, 1> vec() const;
  static SmoState from(const Eigen::Matrix<Scalar, kDim, 1>& v);
};

/// Published design inequalities. `u1_max`/`u2_max` are the assumed input
/// bounds; `lambda_slack` loosens the square-root-gain bound by an absolute
/// amount to admit gain sets rounded to the printed precision.
std::vector<std::string> validate(const SmoParams& p, Scalar u1_max, Scalar u2_max,
                                  Scalar lambda_slack = 0.01);

/// Lower bound on lambda11 implied by alpha11, f_plus and p.
Scalar smo_lambda11_bound(const SmoParams& p);

SmoState smo_derivatives(const SmoState& s, const Measurement& y,
                         const SmoParams& p, const MuscleParams& muscle);

// ---------------------------------------------------------------------------
// Adaptive sliding mode observer (dual-layer gain adaptation)

struct AsmoParams {
  Scalar alpha0 = 2.97;   ///< square-root gain scale (recommended 2*sqrt(2*beta0))
  Scalar beta0 = 1.1;     ///< switching gain scale
  Scalar eta1 = 0.2, eta2 = 0.2;  ///< fixed floors of the length-loop gains
  Scalar a = 0.82;        ///< disturbance-margin factor, in (0, 1/beta0)
  Scalar l0 = 0.4;        ///< floor offset of the adaptive magnitude L_a
  Scalar r00 = 0.4, r01 = 0.5, r02 = 0.5;  ///< floor rates of the outer layer
  Scalar tau_a = 0.01;    ///< filter time constant for all three recoveries
  Scalar eps_a1 = 0.2, eps_a2 = 0.2;  ///< inner-layer margins, length loops
  Scalar alpha_a1 = 0.99, alpha_a2 = 0.99;  ///< inner-layer factors in (0, 1)
  Scalar gamma_a0 = 200.0, gamma_a1 = 300.0, gamma_a2 = 300.0;  ///< outer-layer rates
  Scalar delta_00 = 0.001, delta_01 = 0.001, delta_02 = 0.001;  ///< dead-zone widths
  Scalar delta_a = 0.01;  ///< sign-approximation width
  Scalar eps_a = 0.01;    ///< inner-layer margin of the disturbance loop
};

struct AsmoState {
  Scalar xhat1 = 0, xhat2 = 0, xhat3 = 0, xhat4 = 0;
  Scalar delta_hat = 0;
  Scalar uhat1 = 0, uhat2 = 0;
  Scalar l_a = 0;   ///< adaptive part of L_a = l0 + l_a
  Scalar r_a0 = 0;  ///< adapted outer-layer rate, disturbance loop
  Scalar k1 = 0, k2 = 0;      ///< adaptive length-loop gains
  Scalar r_a1 = 0, r_a2 = 0;  ///< adapted outer-layer rates, length loops

  static constexpr int kDim = 13;
  Eigen::Matrix<Scalar, kDim, 1> vec() const;
  static AsmoState from(const Eigen::Matrix<Scalar, kDim, 1>& v);
};

std::vector<std::string> validate(const AsmoParams& p);

/// Right-hand side of the dual-layer adaptive sliding mode observer. The
/// adaptive-magnitude rate is evaluated from the current layer-1 signal before
/// it enters the position equation (the only causal ordering). Throws
/// std::runtime_error if L_a = l0 + l_a has collapsed to a nonpositive value.
AsmoState asmo_derivatives(const AsmoState& s, const Measurement& y,
                           const AsmoParams& p, const MuscleParams& muscle);

// ---------------------------------------------------------------------------
// Activation recovery from estimates

struct ActivationEstimate {
  Scalar a1 = 0, a2 = 0;            ///< raw recovered activations
  Scalar a1_clamped = 0, a2_clamped = 0;
  bool flagged1 = false, flagged2 = false;  ///< sample could not be recovered
};

/// Recovers the two activation signals from estimated states and inputs via
/// the force-balance relation, using the length constraint for the contractile
/// lengths. Singular or out-of-domain samples are flagged (value NaN), never fatal.
ActivationEstimate recover_activation(const Vec4& xhat, Scalar uhat1, Scalar uhat2,
                                      const MuscleParams& muscle);

/// Measurement-consistent initial state shared by all observers: position and
/// tendon lengths from the first measurement, everything else zero (adaptive
/// gains at their floors).
template <typename State>
State observer_init(const Measurement& y0, const MuscleParams& muscle) {
  State s;
  s.xhat1 = y0.y1;
  s.xhat2 = 0.0;
  s.xhat3 = tendon_force_inverse(y0.y2, muscle.tendon);
  s.xhat4 = tendon_force_inverse(y0.y3, muscle.tendon);
  return s;
}

}  // namespace musco
