#include "musco/plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace musco {

PlantState derivatives(const PlantState& state, const VirtualInput& input,
                       Scalar delta, const MuscleParams& params) {
  const auto [L_C1, L_C2] = contractile_lengths(state, params);
  if (L_C1 <= kContractileGuard || L_C2 <= kContractileGuard) {
    std::ostringstream msg;
    msg << "plant domain guard: contractile length L_C" << (L_C1 <= kContractileGuard ? 1 : 2)
        << " = " << (L_C1 <= kContractileGuard ? L_C1 : L_C2) << " <= " << kContractileGuard;
    throw std::runtime_error(msg.str());
  }
  PlantState d;
  d.x1 = state.x2;
  d.x2 = (tendon_force(state.x4, params.tendon) - tendon_force(state.x3, params.tendon)) /
             params.m +
         delta;
  d.x3 = state.x2 + input.u1;
  d.x4 = -state.x2 + input.u2;
  return d;
}

Measurement measure(const PlantState& state, const MuscleParams& params) {
  return {state.x1, tendon_force(state.x3, params.tendon),
          tendon_force(state.x4, params.tendon)};
}

std::pair<Scalar, Scalar> contractile_lengths(const PlantState& state,
                                              const MuscleParams& params) {
  return {state.x1 - state.x3, (params.C - state.x1) - state.x4};
}

std::pair<Scalar, Scalar> contractile_derivatives(const PlantState&,
                                                  const VirtualInput& input) {
  return {-input.u1, -input.u2};
}

namespace {

Vec3 as_vec(const Measurement& y) { return Vec3(y.y1, y.y2, y.y3); }

// y and its time derivative along the plant field, stacked. The rate is a
// central directional difference; the disturbance does not enter [y; dy/dt].
Vec6 output_with_rate(const PlantState& state, const VirtualInput& input,
                      const MuscleParams& params, Scalar eps) {
  const Vec4 f = derivatives(state, input, 0.0, params).vec();
  const Vec4 x = state.vec();
  const Vec3 y = as_vec(measure(state, params));
  const Vec3 y_fwd = as_vec(measure(PlantState::from(x + eps * f), params));
  const Vec3 y_bwd = as_vec(measure(PlantState::from(x - eps * f), params));
  Vec6 out;
  out << y, (y_fwd - y_bwd) / (2.0 * eps);
  return out;
}

}  // namespace

Eigen::Matrix<Scalar, 6, 4> observability_jacobian(const PlantState& state,
                                                   const VirtualInput& input,
                                                   const MuscleParams& params,
                                                   Scalar perturbation) {
  Eigen::Matrix<Scalar, 6, 4> J;
  const Vec4 x = state.vec();
  for (int i = 0; i < 4; ++i) {
    Vec4 dx = Vec4::Zero();
    dx[i] = perturbation;
    const Vec6 hi = output_with_rate(PlantState::from(x + dx), input, params, perturbation);
    const Vec6 lo = output_with_rate(PlantState::from(x - dx), input, params, perturbation);
    J.col(i) = (hi - lo) / (2.0 * perturbation);
  }
  return J;
}

int observability_rank(const PlantState& state, const VirtualInput& input,
                       const MuscleParams& params, Scalar perturbation) {
  const auto J = observability_jacobian(state, input, params, perturbation);
  const Eigen::JacobiSVD<Eigen::Matrix<Scalar, 6, 4>> svd(J);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-6 * sv[0]) ++rank;
  }
  return rank;
}

bool near_tendon_breakpoint(const PlantState& state, const TendonCurve& curve,
                            Scalar margin) {
  for (const Scalar L : {state.x3, state.x4}) {
    if (std::abs(L - curve.slack_end) < margin || std::abs(L - curve.toe_end) < margin) {
      return true;
    }
  }
  return false;
}

}  // namespace musco
