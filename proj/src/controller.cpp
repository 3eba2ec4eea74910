#include "musco/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace musco {

ReferenceSpec table_reference(std::vector<Scalar> tau, std::vector<Scalar> value) {
  if (tau.size() < 2 || tau.size() != value.size()) {
    throw std::invalid_argument("table_reference: need >= 2 matching knots");
  }
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) {
      throw std::invalid_argument("table_reference: knots must be strictly increasing");
    }
  }
  const int n = static_cast<int>(tau.size());

  // Natural cubic spline: tridiagonal system for the interior second derivatives.
  VecX rhs = VecX::Zero(n);
  VecX diag = VecX::Ones(n), lower = VecX::Zero(n), upper = VecX::Zero(n);
  for (int i = 1; i + 1 < n; ++i) {
    const Scalar h0 = tau[i] - tau[i - 1];
    const Scalar h1 = tau[i + 1] - tau[i];
    lower[i] = h0 / 6.0;
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (value[i + 1] - value[i]) / h1 - (value[i] - value[i - 1]) / h0;
  }
  // Thomas elimination (first/last rows are identity: natural ends).
  for (int i = 1; i < n; ++i) {
    const Scalar f = lower[i] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  VecX second = VecX::Zero(n);
  second[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
  }

  ReferenceSpec spec;
  spec.kind = ReferenceSpec::Kind::Table;
  spec.table_tau = std::move(tau);
  spec.table_value = std::move(value);
  spec.table_second.assign(second.data(), second.data() + n);
  return spec;
}

Reference reference_eval(Scalar tau, const ReferenceSpec& spec) {
  switch (spec.kind) {
    case ReferenceSpec::Kind::Constant:
      return {spec.offset, 0.0, 0.0};
    case ReferenceSpec::Kind::Sinusoid: {
      const Scalar s = std::sin(spec.omega * tau);
      const Scalar c = std::cos(spec.omega * tau);
      return {spec.offset + spec.amplitude * s, spec.amplitude * spec.omega * c,
              -spec.amplitude * spec.omega * spec.omega * s};
    }
    case ReferenceSpec::Kind::Table: {
      const auto& ts = spec.table_tau;
      const auto& vs = spec.table_value;
      const auto& ms = spec.table_second;
      if (tau <= ts.front()) return {vs.front(), 0.0, 0.0};
      if (tau >= ts.back()) return {vs.back(), 0.0, 0.0};
      const auto it = std::upper_bound(ts.begin(), ts.end(), tau);
      const int i = static_cast<int>(it - ts.begin()) - 1;
      const Scalar h = ts[i + 1] - ts[i];
      const Scalar a = (ts[i + 1] - tau) / h;
      const Scalar b = (tau - ts[i]) / h;
      Reference out;
      out.r = a * vs[i] + b * vs[i + 1] +
              ((a * a * a - a) * ms[i] + (b * b * b - b) * ms[i + 1]) * h * h / 6.0;
      out.r_dot = (vs[i + 1] - vs[i]) / h +
                  ((3 * b * b - 1) * ms[i + 1] - (3 * a * a - 1) * ms[i]) * h / 6.0;
      out.r_ddot = a * ms[i] + b * ms[i + 1];
      return out;
    }
  }
  return {};
}

Mat2 closed_loop_matrix(const ControllerGains& gains, Scalar m) {
  Mat2 A;
  A << 0, 1, 0, 0;
  Vec2 B(0.0, 1.0 / m);
  return A - B * gains.K;
}

std::vector<std::string> validate(const ControllerGains& gains, Scalar m) {
  std::vector<std::string> bad;
  if ((gains.P - gains.P.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    bad.push_back("controller: P must be symmetric");
  } else {
    const Eigen::SelfAdjointEigenSolver<Mat2> es(gains.P);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      bad.push_back("controller: P must be positive definite");
    }
  }
  if (!(gains.gamma > 0.0)) bad.push_back("controller: gamma must be positive");

  const Mat2 A_cl = closed_loop_matrix(gains, m);
  const Eigen::EigenSolver<Mat2> ecl(A_cl);
  if (ecl.eigenvalues().real().maxCoeff() >= 0.0) {
    bad.push_back("controller: A - B K must be Hurwitz");
  } else if (bad.empty()) {
    const Mat2 Q = -(A_cl.transpose() * gains.P + gains.P * A_cl);
    const Eigen::SelfAdjointEigenSolver<Mat2> eq(0.5 * (Q + Q.transpose()));
    if (eq.eigenvalues().minCoeff() <= 0.0) {
      bad.push_back("controller: implied Q = -(A_cl'P + P A_cl) must be positive definite");
    }
  }
  return bad;
}

namespace {

struct ErrorCoordinates {
  Vec2 e;
  Scalar zeta;
  Scalar w;
};

ErrorCoordinates error_coordinates(const PlantState& state, const Reference& ref,
                                   const Uncertainty& unc, const ControllerGains& gains,
                                   const MuscleParams& params) {
  ErrorCoordinates ec;
  ec.e = Vec2(state.x1 - ref.r, state.x2 - ref.r_dot);
  ec.zeta = tendon_force(state.x4, params.tendon) - tendon_force(state.x3, params.tendon) +
            params.m * unc.delta - params.m * ref.r_dot;
  ec.w = ec.zeta + gains.K.dot(ec.e);
  return ec;
}

}  // namespace

ControlResult control(const PlantState& state, const Reference& ref,
                      const Uncertainty& unc, const ControllerGains& gains,
                      const MuscleParams& params, Scalar u1_max, Scalar u2_max) {
  const Scalar dphi1 = tendon_force_derivative(state.x3, params.tendon);
  const Scalar dphi2 = tendon_force_derivative(state.x4, params.tendon);

  ControlResult res;
  res.allocation = dphi1 * dphi1 + dphi2 * dphi2;
  if (res.allocation <= kAllocationEpsilon) {
    std::ostringstream msg;
    msg << "control allocation singular: both tendons slack (Phi' sum of squares = "
        << res.allocation << ")";
    throw std::runtime_error(msg.str());
  }

  const ErrorCoordinates ec = error_coordinates(state, ref, unc, gains, params);

  Mat2 A;
  A << 0, 1, 0, 0;
  const Vec2 B(0.0, 1.0 / params.m);
  const Scalar K1 = gains.gamma + gains.K.dot(B);
  const RowVec2 K2 =
      (gains.K * A + gains.gamma * gains.K + B.transpose() * gains.P).eval();

  res.beta = -K1 * ec.zeta - K2.dot(ec.e) - (dphi1 + dphi2) * state.x2 +
             params.m * ref.r_ddot;
  if (gains.delta_dot_feedforward) res.beta -= params.m * unc.delta_dot;

  res.u.u1 = -dphi1 / res.allocation * res.beta;
  res.u.u2 = dphi2 / res.allocation * res.beta;
  if (std::abs(res.u.u1) > u1_max) {
    res.u.u1 = std::copysign(u1_max, res.u.u1);
    res.clamped_u1 = true;
  }
  if (std::abs(res.u.u2) > u2_max) {
    res.u.u2 = std::copysign(u2_max, res.u.u2);
    res.clamped_u2 = true;
  }
  return res;
}

Scalar lyapunov_value(const PlantState& state, const Reference& ref,
                      const Uncertainty& unc, const ControllerGains& gains,
                      const MuscleParams& params) {
  const ErrorCoordinates ec = error_coordinates(state, ref, unc, gains, params);
  return 0.5 * ec.e.dot(gains.P * ec.e) + 0.5 * ec.w * ec.w;
}

Scalar error_activity(const PlantState& state, const Reference& ref,
                      const Uncertainty& unc, const ControllerGains& gains,
                      const MuscleParams& params) {
  const ErrorCoordinates ec = error_coordinates(state, ref, unc, gains, params);
  return ec.e.norm() + std::abs(ec.w);
}

}  // namespace musco
