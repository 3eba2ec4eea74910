#include "musco/observers.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace musco {

Scalar sign_approx(Scalar e, Scalar width) { return e / (width + std::abs(e)); }

bool polynomial_hurwitz(const std::vector<Scalar>& monic_tail) {
  const int n = static_cast<int>(monic_tail.size());
  if (n == 0) return true;
  MatX companion = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) companion(0, i) = -monic_tail[i];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  const Eigen::EigenSolver<MatX> es(companion);
  return es.eigenvalues().real().maxCoeff() < 0.0;
}

// ---------------------------------------------------------------------------
// High gain observer

Eigen::Matrix<Scalar, 7, 1> HgoState::vec() const {
  Eigen::Matrix<Scalar, 7, 1> v;
  v << xhat1, xhat2, xhat3, xhat4, delta_hat, uhat1, uhat2;
  return v;
}

HgoState HgoState::from(const Eigen::Matrix<Scalar, 7, 1>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

std::vector<std::string> validate(const HgoParams& p) {
  std::vector<std::string> bad;
  if (!(p.eps_h > 0.0 && p.eps_h < 1.0)) bad.push_back("hgo: eps_h must lie in (0, 1)");
  for (const auto& [name, v] : {std::pair<const char*, Scalar>{"h11", p.h11},
                                {"h12", p.h12}, {"h13", p.h13}, {"h21", p.h21},
                                {"h22", p.h22}, {"h31", p.h31}, {"h32", p.h32}}) {
    if (!(v > 0.0)) bad.push_back(std::string("hgo: ") + name + " must be positive");
  }
  if (!polynomial_hurwitz({p.h11, p.h12, p.h13})) {
    bad.push_back("hgo: s^3 + h11 s^2 + h12 s + h13 must be Hurwitz");
  }
  if (!polynomial_hurwitz({p.h21, p.h22})) {
    bad.push_back("hgo: s^2 + h21 s + h22 must be Hurwitz");
  }
  if (!polynomial_hurwitz({p.h31, p.h32})) {
    bad.push_back("hgo: s^2 + h31 s + h32 must be Hurwitz");
  }
  return bad;
}

HgoState hgo_derivatives(const HgoState& s, const Measurement& y,
                         const HgoParams& p, const MuscleParams& muscle) {
  const Scalar e1 = y.y1 - s.xhat1;
  const Scalar e3 = tendon_force_inverse(y.y2, muscle.tendon) - s.xhat3;
  const Scalar e4 = tendon_force_inverse(y.y3, muscle.tendon) - s.xhat4;
  const Scalar eps = p.eps_h;
  const Scalar eps2 = eps * eps;

  HgoState d;
  d.xhat1 = s.xhat2 + p.h11 / eps * e1;
  d.xhat2 = (y.y3 - y.y2) / muscle.m + s.delta_hat + p.h12 / eps2 * e1;
  d.delta_hat = p.h13 / (eps2 * eps) * e1;
  d.xhat3 = s.xhat2 + s.uhat1 + p.h21 / eps * e3;
  d.uhat1 = p.h22 / eps2 * e3;
  d.xhat4 = -s.xhat2 + s.uhat2 + p.h31 / eps * e4;
  d.uhat2 = p.h32 / eps2 * e4;
  return d;
}

// ---------------------------------------------------------------------------
// Sliding mode observer

Eigen::Matrix<Scalar, 7, 1> SmoState::vec() const {
  Eigen::Matrix<Scalar, 7, 1> v;
  v << xhat1, xhat2, xhat3, xhat4, delta_hat, uhat1, uhat2;
  return v;
}

SmoState SmoState::from(const Eigen::Matrix<Scalar, 7, 1>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

Scalar smo_lambda11_bound(const SmoParams& p) {
  return std::sqrt(2.0 / (p.alpha11 - p.f_plus)) * (p.alpha11 + p.f_plus) *
         (1.0 + p.p) / (1.0 - p.p);
}

std::vector<std::string> validate(const SmoParams& p, Scalar u1_max, Scalar u2_max,
                                  Scalar lambda_slack) {
  std::vector<std::string> bad;
  if (!(p.f_plus > 0.0)) bad.push_back("smo: f_plus must be positive");
  if (!(p.p > 0.0 && p.p < 1.0)) bad.push_back("smo: p must lie in (0, 1)");
  if (!(p.tau_s > 0.0)) bad.push_back("smo: tau_s must be positive");
  if (!(p.delta_s > 0.0)) bad.push_back("smo: delta_s must be positive");
  if (!(p.alpha11 > p.f_plus)) {
    std::ostringstream msg;
    msg << "smo: alpha11 (" << p.alpha11 << ") must exceed f_plus (" << p.f_plus << ")";
    bad.push_back(msg.str());
  } else {
    const Scalar bound = smo_lambda11_bound(p);
    if (!(p.lambda11 >= bound - lambda_slack)) {
      std::ostringstream msg;
      msg << "smo: lambda11 (" << p.lambda11
          << ") must be at least sqrt(2/(alpha11-f_plus))*(alpha11+f_plus)(1+p)/(1-p) = "
          << bound;
      bad.push_back(msg.str());
    }
  }
  if (!(p.alpha2 > u1_max)) {
    std::ostringstream msg;
    msg << "smo: alpha2 (" << p.alpha2 << ") must exceed the input bound U_1m ("
        << u1_max << ")";
    bad.push_back(msg.str());
  }
  if (!(p.alpha3 > u2_max)) {
    std::ostringstream msg;
    msg << "smo: alpha3 (" << p.alpha3 << ") must exceed the input bound U_2m ("
        << u2_max << ")";
    bad.push_back(msg.str());
  }
  return bad;
}

SmoState smo_derivatives(const SmoState& s, const Measurement& y,
                         const SmoParams& p, const MuscleParams& muscle) {
  const Scalar e1 = y.y1 - s.xhat1;
  const Scalar e3 = tendon_force_inverse(y.y2, muscle.tendon) - s.xhat3;
  const Scalar e4 = tendon_force_inverse(y.y3, muscle.tendon) - s.xhat4;

  const Scalar v11 = p.lambda11 * std::sqrt(std::abs(e1)) * sign_approx(e1, p.delta_s);
  const Scalar v12 = p.alpha11 * sign_approx(e1, p.delta_s);
  const Scalar v2 = p.alpha2 * sign_approx(e3, p.delta_s);
  const Scalar v3 = p.alpha3 * sign_approx(e4, p.delta_s);

  SmoState d;
  d.xhat1 = s.xhat2 + v11;
  d.xhat2 = (y.y3 - y.y2) / muscle.m + v12;
  d.xhat3 = s.xhat2 + v2;
  d.xhat4 = -s.xhat2 + v3;
  d.delta_hat = (-s.delta_hat + v12) / p.tau_s;
  d.uhat1 = (-s.uhat1 + v2) / p.tau_s;
  d.uhat2 = (-s.uhat2 + v3) / p.tau_s;
  return d;
}

// ---------------------------------------------------------------------------
// Adaptive sliding mode observer

Eigen::Matrix<Scalar, 13, 1> AsmoState::vec() const {
  Eigen::Matrix<Scalar, 13, 1> v;
  v << xhat1, xhat2, xhat3, xhat4, delta_hat, uhat1, uhat2, l_a, r_a0, k1, k2, r_a1,
      r_a2;
  return v;
}

AsmoState AsmoState::from(const Eigen::Matrix<Scalar, 13, 1>& v) {
  AsmoState s;
  s.xhat1 = v[0];
  s.xhat2 = v[1];
  s.xhat3 = v[2];
  s.xhat4 = v[3];
  s.delta_hat = v[4];
  s.uhat1 = v[5];
  s.uhat2 = v[6];
  s.l_a = v[7];
  s.r_a0 = v[8];
  s.k1 = v[9];
  s.k2 = v[10];
  s.r_a1 = v[11];
  s.r_a2 = v[12];
  return s;
}

std::vector<std::string> validate(const AsmoParams& p) {
  std::vector<std::string> bad;
  for (const auto& [name, v] : {std::pair<const char*, Scalar>{"alpha0", p.alpha0},
                                {"beta0", p.beta0}, {"eta1", p.eta1}, {"eta2", p.eta2},
                                {"l0", p.l0}, {"r00", p.r00}, {"r01", p.r01},
                                {"r02", p.r02}, {"tau_a", p.tau_a},
                                {"eps_a1", p.eps_a1}, {"eps_a2", p.eps_a2},
                                {"gamma_a0", p.gamma_a0}, {"gamma_a1", p.gamma_a1},
                                {"gamma_a2", p.gamma_a2}, {"delta_00", p.delta_00},
                                {"delta_01", p.delta_01}, {"delta_02", p.delta_02},
                                {"delta_a", p.delta_a}, {"eps_a", p.eps_a}}) {
    if (!(v > 0.0)) bad.push_back(std::string("asmo: ") + name + " must be positive");
  }
  if (!(p.a > 0.0 && p.a * p.beta0 < 1.0)) {
    bad.push_back("asmo: a must lie in (0, 1/beta0)");
  }
  if (!(p.alpha_a1 > 0.0 && p.alpha_a1 < 1.0)) bad.push_back("asmo: alpha_a1 must lie in (0, 1)");
  if (!(p.alpha_a2 > 0.0 && p.alpha_a2 < 1.0)) bad.push_back("asmo: alpha_a2 must lie in (0, 1)");
  return bad;
}

AsmoState asmo_derivatives(const AsmoState& s, const Measurement& y,
                           const AsmoParams& p, const MuscleParams& muscle) {
  const Scalar L_a = p.l0 + s.l_a;
  if (!(L_a > 0.0)) {
    std::ostringstream msg;
    msg << "asmo: adaptive magnitude collapsed, L_a = " << L_a;
    throw std::runtime_error(msg.str());
  }

  const Scalar e1 = y.y1 - s.xhat1;
  const Scalar e3 = tendon_force_inverse(y.y2, muscle.tendon) - s.xhat3;
  const Scalar e4 = tendon_force_inverse(y.y3, muscle.tendon) - s.xhat4;

  const Scalar alpha_a = std::sqrt(L_a) * p.alpha0;
  const Scalar beta_a = L_a * p.beta0;

  // Layer 1 / layer 2 of the disturbance loop. The magnitude rate is needed in
  // the position equation at the same instant, so it is evaluated first.
  const Scalar delta_a0 = L_a - std::abs(s.delta_hat) / (p.a * p.beta0) - p.eps_a;
  const Scalar rho_a0 = p.r00 + s.r_a0;
  const Scalar dl_a = -rho_a0 * sign_approx(delta_a0, p.delta_a);
  const Scalar dr_a0 = std::abs(delta_a0) > p.delta_00 ? p.gamma_a0 * std::abs(delta_a0) : 0.0;
  const Scalar phi = -(dl_a / L_a) * e1;

  const Scalar s1 = sign_approx(e1, p.delta_a);
  const Scalar s3 = sign_approx(e3, p.delta_a);
  const Scalar s4 = sign_approx(e4, p.delta_a);

  // Length-loop adaptation.
  const Scalar delta_a1 = s.k1 - std::abs(s.uhat1) / p.alpha_a1 - p.eps_a1;
  const Scalar delta_a2 = s.k2 - std::abs(s.uhat2) / p.alpha_a2 - p.eps_a2;
  const Scalar dk1 = -(p.r01 + s.r_a1) * sign_approx(delta_a1, p.delta_a);
  const Scalar dk2 = -(p.r02 + s.r_a2) * sign_approx(delta_a2, p.delta_a);
  const Scalar dr_a1 = std::abs(delta_a1) > p.delta_01 ? p.gamma_a1 * std::abs(delta_a1) : 0.0;
  const Scalar dr_a2 = std::abs(delta_a2) > p.delta_02 ? p.gamma_a2 * std::abs(delta_a2) : 0.0;

  const Scalar g1 = (s.k1 + p.eta1) * s3;
  const Scalar g2 = (s.k2 + p.eta2) * s4;

  AsmoState d;
  d.xhat1 = s.xhat2 + alpha_a * std::sqrt(std::abs(e1)) * s1 - phi;
  d.xhat2 = (y.y3 - y.y2) / muscle.m + beta_a * s1;
  d.delta_hat = (-s.delta_hat + beta_a * s1) / p.tau_a;
  d.xhat3 = s.xhat2 + g1;
  d.uhat1 = (-s.uhat1 + g1) / p.tau_a;
  d.xhat4 = -s.xhat2 + g2;
  d.uhat2 = (-s.uhat2 + g2) / p.tau_a;
  d.l_a = dl_a;
  d.r_a0 = dr_a0;
  d.k1 = dk1;
  d.k2 = dk2;
  d.r_a1 = dr_a1;
  d.r_a2 = dr_a2;
  return d;
}

// ---------------------------------------------------------------------------
// Activation recovery

ActivationEstimate recover_activation(const Vec4& xhat, Scalar uhat1, Scalar uhat2,
                                      const MuscleParams& muscle) {
  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
  ActivationEstimate est;

  const Scalar L_C[2] = {xhat[0] - xhat[2], (muscle.C - xhat[0]) - xhat[3]};
  const Scalar L_S[2] = {xhat[2], xhat[3]};
  const Scalar uhat[2] = {uhat1, uhat2};

  for (int j = 0; j < 2; ++j) {
    Scalar raw = nan, clamped = nan;
    bool flagged = true;
    if (L_C[j] > 0.0) {
      try {
        const Activation a = activation_from(uhat[j], L_S[j], L_C[j], muscle);
        if (!a.ill_conditioned && std::isfinite(a.raw)) {
          raw = a.raw;
          clamped = a.clamped;
          flagged = false;
        }
      } catch (const std::domain_error&) {
        // singular (u = 1) or out-of-range input estimate; sample stays flagged
      }
    }
    if (j == 0) {
      est.a1 = raw;
      est.a1_clamped = clamped;
      est.flagged1 = flagged;
    } else {
      est.a2 = raw;
      est.a2_clamped = clamped;
      est.flagged2 = flagged;
    }
  }
  return est;
}

}  // namespace musco
