#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "musco/controller.hpp"

using namespace musco;

TEST_CASE("reference families") {
  ReferenceSpec sine;  // defaults: 2.6315 + 0.01 sin(0.5 tau)
  const Reference r0 = reference_eval(0.0, sine);
  CHECK(r0.r == doctest::Approx(2.6315).epsilon(1e-14));
  CHECK(r0.r_dot == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(r0.r_ddot == 0.0);

  ReferenceSpec cst;
  cst.kind = ReferenceSpec::Kind::Constant;
  cst.offset = 1.75;
  const Reference rc = reference_eval(3.2, cst);
  CHECK(rc.r == 1.75);
  CHECK(rc.r_dot == 0.0);
  CHECK(rc.r_ddot == 0.0);

  // derivative consistency against central differences
  for (const double tau : {0.3, 1.7, 9.4}) {
    const double h = 1e-5;
    const double fd =
        (reference_eval(tau + h, sine).r - reference_eval(tau - h, sine).r) / (2 * h);
    CHECK(std::abs(reference_eval(tau, sine).r_dot - fd) <= 1e-8);
    const double fdd =
        (reference_eval(tau + h, sine).r_dot - reference_eval(tau - h, sine).r_dot) / (2 * h);
    CHECK(std::abs(reference_eval(tau, sine).r_ddot - fdd) <= 1e-8);
  }
}

TEST_CASE("table reference with spline interpolation") {
  std::vector<double> taus, vals;
  for (int i = 0; i <= 60; ++i) {
    taus.push_back(0.5 * i);
    vals.push_back(2.6315 + 0.01 * std::sin(0.5 * 0.5 * i));
  }
  const ReferenceSpec spec = table_reference(taus, vals);

  for (const double tau : {0.77, 5.3, 14.2, 29.1}) {
    const Reference ref = reference_eval(tau, spec);
    CHECK(std::abs(ref.r - (2.6315 + 0.01 * std::sin(0.5 * tau))) <= 1e-5);
    const double h = 1e-5;
    const double fd =
        (reference_eval(tau + h, spec).r - reference_eval(tau - h, spec).r) / (2 * h);
    CHECK(std::abs(ref.r_dot - fd) <= 1e-7);
  }
  // clamped outside the span
  CHECK(reference_eval(-1.0, spec).r == vals.front());
  CHECK(reference_eval(-1.0, spec).r_dot == 0.0);
  CHECK(reference_eval(31.0, spec).r == vals.back());

  CHECK_THROWS_AS(table_reference({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(table_reference({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("published gain set satisfies every invariant") {
  ControllerGains g;  // defaults hold the published values
  MuscleParams p;
  CHECK(validate(g, p.m).empty());

  const Mat2 A_cl = closed_loop_matrix(g, p.m);
  const Eigen::EigenSolver<Mat2> es(A_cl);
  CHECK(es.eigenvalues().real().maxCoeff() < -0.1);

  // the published (K, P) are consistent with a Riccati equation with state
  // weight 10 I and effort weight 30
  Mat2 A;
  A << 0, 1, 0, 0;
  const Vec2 B(0.0, 1.0 / p.m);
  const Mat2 res = A.transpose() * g.P + g.P * A -
                   g.P * B * (1.0 / 30.0) * B.transpose() * g.P +
                   10.0 * Mat2::Identity();
  CHECK(res.cwiseAbs().maxCoeff() <= 1e-2);
  const RowVec2 K_ric = (1.0 / 30.0) * B.transpose() * g.P;
  CHECK((g.K - K_ric).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("invalid gain sets are rejected") {
  MuscleParams p;
  ControllerGains g;
  g.K = RowVec2(-1.0, -1.0);  // destabilizing feedback
  CHECK(!validate(g, p.m).empty());

  ControllerGains g2;
  g2.P << 1.0, 5.0, 5.0, 1.0;  // indefinite
  CHECK(!validate(g2, p.m).empty());

  ControllerGains g3;
  g3.gamma = -1.0;
  CHECK(!validate(g3, p.m).empty());
}

TEST_CASE("control law") {
  MuscleParams p;
  ControllerGains g;

  SUBCASE("equilibrium on the manifold gives zero input") {
    const PlantState x{2.6315, 0.0, 2.02, 2.02};
    const Reference ref{2.6315, 0.0, 0.0};
    const ControlResult res = control(x, ref, {0.0, 0.0}, g, p);
    CHECK(res.beta == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(res.u.u1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(res.u.u2 == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("equal stiffness splits the command symmetrically") {
    const PlantState x{2.64, 0.01, 2.02, 2.02};
    const Reference ref = reference_eval(0.7, ReferenceSpec{});
    const ControlResult res = control(x, ref, {0.004, 0.001}, g, p);
    const double sigma = tendon_force_derivative(2.02, p.tendon);
    CHECK(res.u.u1 == doctest::Approx(-res.beta / (2 * sigma)).epsilon(1e-12));
    CHECK(res.u.u2 == doctest::Approx(res.beta / (2 * sigma)).epsilon(1e-12));
  }

  SUBCASE("allocation is the minimum-norm solution") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> len(2.005, 2.2), pos(2.5, 2.8),
        vel(-0.2, 0.2), d(-0.05, 0.05);
    for (int i = 0; i < 200; ++i) {
      const PlantState x{pos(rng), vel(rng), len(rng), len(rng)};
      const Reference ref = reference_eval(0.0, ReferenceSpec{});
      const ControlResult res = control(x, ref, {d(rng), d(rng)}, g, p, 1e9, 1e9);
      const double f1 = tendon_force_derivative(x.x3, p.tendon);
      const double f2 = tendon_force_derivative(x.x4, p.tendon);
      // solves the force-rate equation
      CHECK(std::abs(f2 * res.u.u2 - f1 * res.u.u1 - res.beta) <= 1e-10 * std::max(1.0, std::abs(res.beta)));
      // minimal norm along the solution line
      const double n0 = res.u.u1 * res.u.u1 + res.u.u2 * res.u.u2;
      for (int k = -5; k <= 5; ++k) {
        if (k == 0) continue;
        const double t = 0.02 * k;
        const double a1 = res.u.u1 + t * f2, a2 = res.u.u2 + t * f1;
        CHECK(n0 <= a1 * a1 + a2 * a2 + 1e-12);
      }
    }
  }

  SUBCASE("clamping is reported and saturates at the bound") {
    const PlantState x{3.1, 0.5, 2.2, 2.2};  // large error -> large beta
    const Reference ref{2.6315, 0.0, 0.0};
    const ControlResult res = control(x, ref, {0.0, 0.0}, g, p, 0.05, 0.05);
    CHECK(res.clamped_u1);
    CHECK(res.clamped_u2);
    CHECK(std::abs(res.u.u1) == 0.05);
    CHECK(std::abs(res.u.u2) == 0.05);
  }

  SUBCASE("both tendons slack is a singular allocation") {
    const PlantState x{2.77, 0.0, 1.95, 1.9};
    const Reference ref{2.6315, 0.0, 0.0};
    CHECK_THROWS_WITH_AS(control(x, ref, {0.0, 0.0}, g, p),
                         doctest::Contains("slack"), std::runtime_error);
  }
}

TEST_CASE("delta-rate feedforward flag") {
  MuscleParams p;
  ControllerGains g_on, g_off;
  g_off.delta_dot_feedforward = false;
  const PlantState x{2.64, 0.01, 2.02, 2.03};
  const Reference ref = reference_eval(0.4, ReferenceSpec{});
  const Uncertainty unc{0.005, 0.004};
  const double b_on = control(x, ref, unc, g_on, p).beta;
  const double b_off = control(x, ref, unc, g_off, p).beta;
  CHECK(b_off - b_on == doctest::Approx(p.m * unc.delta_dot).epsilon(1e-12));
}

TEST_CASE("lyapunov diagnostics") {
  MuscleParams p;
  ControllerGains g;
  const Reference ref{2.6315, 0.0, 0.0};
  const PlantState at_ref{2.6315, 0.0, 2.02, 2.02};
  CHECK(lyapunov_value(at_ref, ref, {0.0, 0.0}, g, p) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(error_activity(at_ref, ref, {0.0, 0.0}, g, p) == doctest::Approx(0.0).epsilon(1e-14));

  const PlantState off{2.70, 0.1, 2.02, 2.03};
  CHECK(lyapunov_value(off, ref, {0.0, 0.0}, g, p) > 0.0);
  CHECK(error_activity(off, ref, {0.0, 0.0}, g, p) > 0.0);
}
