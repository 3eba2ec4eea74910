#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "musco/plant.hpp"

using namespace musco;

TEST_CASE("plant derivative field") {
  MuscleParams p;

  SUBCASE("balanced rest is an equilibrium") {
    const PlantState x{2.77, 0.0, 2.02, 2.02};
    const PlantState d = derivatives(x, {0.0, 0.0}, 0.0, p);
    CHECK(d.vec().norm() == 0.0);
  }

  SUBCASE("hand-evaluated point") {
    const PlantState x{2.77, 0.1, 2.02, 2.02};
    const PlantState d = derivatives(x, {0.0, 0.0}, 0.0, p);
    CHECK(d.x1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(d.x2 == 0.0);
    CHECK(d.x3 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(d.x4 == doctest::Approx(-0.1).epsilon(1e-14));
  }

  SUBCASE("disturbance is additive on the velocity channel") {
    const PlantState x{2.77, 0.1, 2.02, 2.03};
    const PlantState d0 = derivatives(x, {0.0, 0.0}, 0.0, p);
    const PlantState d1 = derivatives(x, {0.0, 0.0}, 0.01, p);
    CHECK(d1.x2 - d0.x2 == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(d1.x1 == d0.x1);
    CHECK(d1.x3 == d0.x3);
    CHECK(d1.x4 == d0.x4);
  }

  SUBCASE("guard violation names the contractile length") {
    const PlantState x{2.07, 0.0, 2.02, 2.02};  // L_C1 = 0.05
    CHECK_THROWS_WITH_AS(derivatives(x, {0.0, 0.0}, 0.0, p),
                         doctest::Contains("L_C1"), std::runtime_error);
  }

  SUBCASE("field is affine in (u1, u2, delta)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(2.4, 3.1), vel(-0.3, 0.3),
        len(1.95, 2.1), in(-0.5, 0.5);
    for (int i = 0; i < 200; ++i) {
      const PlantState x{pos(rng), vel(rng), len(rng), len(rng)};
      const double u1 = in(rng), u2 = in(rng), dl = 0.1 * in(rng);
      const Vec4 base = derivatives(x, {0, 0}, 0, p).vec();
      const Vec4 du1 = derivatives(x, {u1, 0}, 0, p).vec() - base;
      const Vec4 du2 = derivatives(x, {0, u2}, 0, p).vec() - base;
      const Vec4 dd = derivatives(x, {0, 0}, dl, p).vec() - base;
      const Vec4 full = derivatives(x, {u1, u2}, dl, p).vec();
      CHECK((full - (base + du1 + du2 + dd)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("measurement map") {
  MuscleParams p;
  const Measurement y = measure({2.77, 0.0, 2.1, 2.1}, p);
  CHECK(y.y1 == 2.77);
  CHECK(y.y2 == doctest::Approx(1.653848).epsilon(1e-9));
  CHECK(y.y3 == doctest::Approx(1.653848).epsilon(1e-9));

  CHECK(measure({2.77, 0.0, 1.95, 2.1}, p).y2 == 0.0);  // slack tendon

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(2.0, 3.5);
  for (int i = 0; i < 50; ++i) {
    PlantState x{pos(rng), 0.0, 2.02, 2.02};
    CHECK(measure(x, p).y1 == x.x1);
  }
}

TEST_CASE("contractile lengths and their rates") {
  MuscleParams p;
  const auto [lc1, lc2] = contractile_lengths({2.77, 0.0, 2.02, 2.02}, p);
  CHECK(lc1 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(lc2 == doctest::Approx(0.75).epsilon(1e-14));

  // symmetry at the midpoint
  const auto [a, b] = contractile_lengths({p.C / 2, 0.0, 2.01, 2.01}, p);
  CHECK(a == doctest::Approx(b).epsilon(1e-14));

  // constraint identity: L_C1 + x3 + L_C2 + x4 == C
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(2.3, 3.2), len(1.9, 2.2);
  for (int i = 0; i < 100; ++i) {
    const PlantState x{pos(rng), 0.0, len(rng), len(rng)};
    const auto [l1, l2] = contractile_lengths(x, p);
    CHECK(l1 + x.x3 + l2 + x.x4 == doctest::Approx(p.C).epsilon(1e-14));
  }

  const auto [dl1, dl2] = contractile_derivatives({}, {0.2, -0.1});
  CHECK(dl1 == -0.2);
  CHECK(dl2 == 0.1);
  const auto [z1, z2] = contractile_derivatives({}, {0.0, 0.0});
  CHECK(z1 == 0.0);
  CHECK(z2 == 0.0);

  // d/dt (x1 - x3) from the field equals -u1
  const PlantState x{2.77, 0.13, 2.02, 2.03};
  const VirtualInput u{0.07, -0.04};
  const PlantState d = derivatives(x, u, 0.002, p);
  CHECK(d.x1 - d.x3 == doctest::Approx(-u.u1).epsilon(1e-14));
}

TEST_CASE("local observability rank") {
  MuscleParams p;
  const PlantState generic{2.77, 0.1, 2.02, 2.02};
  CHECK(observability_rank(generic, {0.0, 0.0}, p) == 4);

  // forces in the linear tendon region
  CHECK(observability_rank({2.77, 0.05, 2.1, 2.1}, {0.01, -0.01}, p) == 4);

  // both tendons slack: force rows vanish, rank drops
  const PlantState slack{2.77, 0.1, 1.9, 1.9};
  CHECK(observability_rank(slack, {0.0, 0.0}, p) < 4);

  // rank is invariant under measurement-channel reordering
  const auto J = observability_jacobian(generic, {0.0, 0.0}, p);
  Eigen::Matrix<double, 6, 4> Jp;
  Jp << J.row(2), J.row(0), J.row(1), J.row(5), J.row(3), J.row(4);
  const auto rank_of = [](const Eigen::Matrix<double, 6, 4>& M) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 4>> svd(M);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()[i] > 1e-6 * svd.singularValues()[0]) ++r;
    }
    return r;
  };
  CHECK(rank_of(J) == rank_of(Jp));

  CHECK(near_tendon_breakpoint({2.77, 0.0, 2.04, 2.02}, p.tendon, 1e-4));
  CHECK(!near_tendon_breakpoint(generic, p.tendon, 1e-4));
}
