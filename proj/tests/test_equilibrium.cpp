#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "qfd/equilibrium.hpp"

using namespace qfd;

namespace {

// Direct evaluation in long double.
double c_oracle(long double l) {
  return static_cast<double>(0.5L * std::log(1.0L - l * l) +
                             0.5L * l * std::log((1.0L + l) / (1.0L - l)));
}

MomentState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  MomentState st;
  st.n[0] = pos(rng);
  for (std::size_t s = 1; s < 4; ++s) st.n[s] = 0.3 * st.n[0] * u(rng);
  for (std::size_t s = 0; s < 4; ++s) st.J[s] = {u(rng), u(rng)};
  return st;
}

// Brute-force trapezoidal moments on a wide box; spectrally accurate for
// Gaussian-times-polynomial integrands and independent of Gauss-Hermite.
MomentTable trapezoid_moments(const std::function<PauliComponents(const Vec2&)>& w,
                              const Vec2& center, double scale) {
  const int n = 241;
  const double half = 12.0 * scale;
  const double h = 2.0 * half / (n - 1);
  MomentTable t;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Vec2 p{center[0] - half + a * h, center[1] - half + b * h};
      const PauliComponents c = w(p);
      const double wt = h * h;
      for (std::size_t s = 0; s < 4; ++s) {
        t.n[s] += wt * c[s];
        for (std::size_t i = 0; i < 2; ++i) {
          t.J[s][i] += wt * p[i] * c[s];
          for (std::size_t k = 0; k < 2; ++k) t.Q2[s][i][k] += wt * p[i] * p[k] * c[s];
        }
      }
    }
  }
  return t;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

}  // namespace

TEST_CASE("c_of_lambda values") {
  CHECK(c_of_lambda(0.0) == 0.0);
  CHECK(c_of_lambda(0.5) == doctest::Approx(0.130812).epsilon(1e-6));
  CHECK(c_of_lambda(0.5) == doctest::Approx(c_oracle(0.5L)).epsilon(1e-14));
  CHECK(std::abs(c_of_lambda(1.0 - 1e-10) - std::log(2.0)) < 1e-6);
  CHECK_THROWS_AS(c_of_lambda(1.0), DomainError);
  CHECK_THROWS_AS(c_of_lambda(-0.1), DomainError);
  CHECK_THROWS_AS(c_of_lambda(std::nan("")), DomainError);
}

TEST_CASE("c_of_lambda both branches agree with the long double oracle") {
  for (double l : {1e-6, 0.1, 0.3, 0.7, 0.9, 0.99, 0.999999, 1.0 - 1e-7, 1.0 - 2e-9}) {
    CHECK(c_of_lambda(l) == doctest::Approx(c_oracle(static_cast<long double>(l))).epsilon(1e-9));
  }
}

TEST_CASE("c_prime matches finite differences and c is increasing and convex") {
  const double h = 1e-6;
  double prev = c_of_lambda(0.0);
  double prev_slope = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const double l = 0.01 * i;
    const double fd = (c_of_lambda(l + h) - c_of_lambda(l - h)) / (2.0 * h);
    CHECK(std::abs(fd - c_prime(l)) < 1e-6);
    const double c = c_of_lambda(l);
    CHECK(c > prev);
    CHECK(c_prime(l) > prev_slope);
    prev = c;
    prev_slope = c_prime(l);
  }
  CHECK(prev < std::log(2.0));
}

TEST_CASE("entropy of Maxwellian states") {
  const PhysParams params;
  const std::vector<double> area{1.0};
  QuadratureSpec quad;
  for (double n0 : {1.0, 2.0}) {
    const PhaseSpaceSampler w = [n0](std::size_t, const Vec2& p) {
      return PauliComponents{
          {n0 * std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1])) / (2.0 * std::numbers::pi), 0, 0, 0}};
    };
    const double expected = n0 * (std::log(n0) - std::log(2.0 * std::numbers::pi));
    CHECK(std::abs(entropy_semiclassical(w, area, params, quad) - expected) < 1e-6);
  }
}

TEST_CASE("entropy spatial weights are additive") {
  const PhysParams params;
  const std::vector<double> weights{0.25, 0.5, 0.25};
  const PhaseSpaceSampler w = [](std::size_t x, const Vec2& p) {
    const double n0 = 1.0 + static_cast<double>(x);
    return PauliComponents{
        {n0 * std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1])) / (2.0 * std::numbers::pi), 0, 0, 0}};
  };
  double expected = 0.0;
  for (std::size_t x = 0; x < 3; ++x) {
    const double n0 = 1.0 + static_cast<double>(x);
    expected += weights[x] * n0 * (std::log(n0) - std::log(2.0 * std::numbers::pi));
  }
  CHECK(entropy_semiclassical(w, weights, params, QuadratureSpec{}) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("entropy with a small spin polarization approaches the scalar value") {
  const PhysParams params;
  const std::vector<double> area{1.0};
  const double base = -std::log(2.0 * std::numbers::pi);
  for (double lam : {1e-3, 1e-4}) {
    const PhaseSpaceSampler w = [lam](std::size_t, const Vec2& p) {
      const double g = std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1])) / (2.0 * std::numbers::pi);
      return PauliComponents{{g, 0.0, 0.0, lam * g}};
    };
    // c(lambda) ~ lambda^2 / 2 for small lambda.
    const double got = entropy_semiclassical(w, area, params, QuadratureSpec{});
    CHECK(got - base == doctest::Approx(0.5 * lam * lam).epsilon(1e-3));
  }
}

TEST_CASE("entropy rejects |w_vec| >= w_0 and names the sample") {
  const PhysParams params;
  const std::vector<double> weights{1.0, 1.0};
  const PhaseSpaceSampler w = [](std::size_t x, const Vec2& p) {
    const double g = std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1]));
    return PauliComponents{{g, x == 1 ? 2.0 * g : 0.0, 0.0, 0.0}};
  };
  try {
    entropy_semiclassical(w, weights, params, QuadratureSpec{});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("spatial sample 1") != std::string::npos);
  }
}

TEST_CASE("equilibrium_from_multipliers worked example") {
  PhysParams params;
  Multipliers q;
  q.q0_0 = -1.0;
  q.qs_0 = {3.0, 0.0, 4.0};
  const PauliComponents w = equilibrium_from_multipliers(q, params, {0.0, 0.0});
  CHECK(w[0] == doctest::Approx(std::cosh(5.0)).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.6 * std::sinh(5.0)).epsilon(1e-14));
  CHECK(w[2] == 0.0);
  CHECK(w[3] == doctest::Approx(0.8 * std::sinh(5.0)).epsilon(1e-14));

  Multipliers zero;
  const PauliComponents w0 = equilibrium_from_multipliers(zero, params, {0.3, 0.4});
  CHECK(w0[0] == doctest::Approx(std::exp(-(1.0 + 0.125))).epsilon(1e-15));
  CHECK(w0.vector_norm() == 0.0);
}

TEST_CASE("full equilibrium dominates its spin part for random multipliers") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const PhysParams params;
  for (int trial = 0; trial < 500; ++trial) {
    Multipliers q;
    q.q0_0 = u(rng);
    q.q0_k = {u(rng), u(rng)};
    for (std::size_t s = 0; s < 3; ++s) {
      q.qs_0[s] = u(rng);
      q.qs_k[s] = {u(rng), u(rng)};
    }
    const PauliComponents w = equilibrium_from_multipliers(q, params, {u(rng), u(rng)});
    CHECK(w[0] > w.vector_norm());
  }
}

TEST_CASE("linearized equilibrium agrees to second order in the spin multipliers") {
  const PhysParams params;
  const std::vector<double> scales{1e-4, 3e-5, 1e-5};
  std::vector<double> ratios;
  for (double eps : scales) {
    Multipliers q;
    q.q0_0 = 0.2;
    q.q0_k = {0.1, -0.3};
    q.qs_0 = {eps, -0.5 * eps, 0.7 * eps};
    q.qs_k = {Vec2{0.0, 0.0}, Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
    double worst = 0.0;
    for (double px : {-1.0, 0.0, 1.5}) {
      const Vec2 p{px, 0.5};
      const PauliComponents full = equilibrium_from_multipliers(q, params, p);
      const PauliComponents lin = equilibrium_linearized(q, params, p);
      for (std::size_t s = 0; s < 4; ++s) worst = std::max(worst, std::abs(full[s] - lin[s]));
    }
    ratios.push_back(worst / (eps * eps));
  }
  // The fitted constant is stable across the decade.
  for (double r : ratios) {
    CHECK(r > 0.0);
    CHECK(r < 2.0 * ratios.front());
    CHECK(r > 0.5 * ratios.front());
  }
}

TEST_CASE("strongly mixed equilibrium pointwise examples") {
  const PhysParams params;
  MomentState st;
  st.n = {2.0, 0.3, -0.2, 0.1};
  st.J[0] = {1.0, -0.5};
  for (std::size_t s = 1; s < 4; ++s) st.J[s] = {st.n[s] * 0.5, st.n[s] * -0.25};
  const Vec2 u0 = st.velocity(0);
  const PauliComponents at_u0 = equilibrium_strongly_mixed(st, params, u0);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(at_u0[s] == doctest::Approx(st.n[s] / (2.0 * std::numbers::pi)).epsilon(1e-15));
  }
  // J_s = n_s u_0: every component is a scaled Maxwellian.
  const Vec2 p{0.3, 1.1};
  const PauliComponents w = equilibrium_strongly_mixed(st, params, p);
  for (std::size_t s = 1; s < 4; ++s) {
    CHECK(w[s] / w[0] == doctest::Approx(st.n[s] / st.n[0]).epsilon(1e-14));
  }
  MomentState bad;
  bad.n[0] = 0.0;
  CHECK_THROWS_AS(equilibrium_strongly_mixed(bad, params, p), DomainError);
}

TEST_CASE("quadrature of a shifted Maxwellian") {
  const PhysParams params;
  QuadratureSpec quad;
  quad.center = {1.0, 0.0};
  const auto w = [](const Vec2& p) {
    const double dx = p[0] - 1.0;
    return PauliComponents{
        {2.0 * std::exp(-0.5 * (dx * dx + p[1] * p[1])) / (2.0 * std::numbers::pi), 0, 0, 0}};
  };
  const MomentTable t = moments_via_quadrature(w, quad);
  CHECK(t.n[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(t.J[0][0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(t.J[0][1]) < 1e-13);
  CHECK(t.Q2[0][0][0] == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(t.Q2[0][1][1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(t.Q2[0][0][1]) < 1e-13);

  const MomentTable z = moments_via_quadrature([](const Vec2&) { return PauliComponents{}; }, quad);
  CHECK(z.n[0] == 0.0);
  CHECK(z.Q2[3][1][1] == 0.0);
}

TEST_CASE("closure tensor worked examples") {
  PhysParams params;
  MomentState st;
  st.n = {1.0, 1.0, 0.0, 0.0};
  st.J[0] = {1.0, 0.0};
  const ClosureTensor L = closure_tensor(st, params);
  CHECK(L(1, 0, 0) == 0.0);
  CHECK(L(1, 1, 1) == 1.0);
  CHECK(L(1, 0, 1) == 0.0);

  MomentState rest;
  rest.n = {1.0, 0.2, 0.3, 0.4};
  params.m = 2.0;
  params.theta = 1.5;
  const ClosureTensor R = closure_tensor(rest, params);
  for (int s = 1; s <= 3; ++s) {
    CHECK(R(s, 0, 0) == doctest::Approx(rest.n[static_cast<std::size_t>(s)] * 3.0));
    CHECK(R(s, 1, 1) == doctest::Approx(rest.n[static_cast<std::size_t>(s)] * 3.0));
    CHECK(R(s, 0, 1) == 0.0);
  }
  MomentState bad;
  CHECK_THROWS_AS(closure_tensor(bad, params), DomainError);
}

TEST_CASE("Gauss-Hermite moments agree with a trapezoidal oracle") {
  std::mt19937_64 rng(3);
  PhysParams params;
  params.m = 1.3;
  params.theta = 0.8;
  for (int trial = 0; trial < 3; ++trial) {
    const MomentState st = random_state(rng);
    const auto w = [&](const Vec2& p) { return equilibrium_strongly_mixed(st, params, p); };
    const MomentTable gh = moments_via_quadrature(w, quadrature_for(st, params));
    const MomentTable tr = trapezoid_moments(w, st.velocity(0), std::sqrt(params.m_theta()));
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(std::abs(gh.n[s] - tr.n[s]) < 1e-10);
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(gh.J[s][i] - tr.J[s][i]) < 1e-10);
        for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(gh.Q2[s][i][k] - tr.Q2[s][i][k]) < 1e-10);
      }
    }
  }
}

TEST_CASE("quadrature moments of the strongly mixed state reproduce closure and inputs") {
  std::mt19937_64 rng(1234);
  PhysParams params;
  for (int trial = 0; trial < 50; ++trial) {
    params.m = 0.5 + (trial % 5) * 0.3;
    params.theta = 0.7 + (trial % 3) * 0.4;
    const MomentState st = random_state(rng);
    const MomentTable t = moments_via_quadrature(
        [&](const Vec2& p) { return equilibrium_strongly_mixed(st, params, p); },
        quadrature_for(st, params));
    const ClosureTensor L = closure_tensor(st, params);
    double scale_n = 0.0, scale_J = 0.0, scale_L = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      scale_n = std::max(scale_n, std::abs(st.n[s]));
      scale_J = std::max({scale_J, std::abs(st.J[s][0]), std::abs(st.J[s][1])});
    }
    for (int s = 1; s <= 3; ++s)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) scale_L = std::max(scale_L, std::abs(L(s, i, k)));
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(rel(t.n[s], st.n[s], scale_n) <= 1e-8);
      CHECK(rel(t.J[s][0], st.J[s][0], scale_J) <= 1e-8);
      CHECK(rel(t.J[s][1], st.J[s][1], scale_J) <= 1e-8);
    }
    for (int s = 1; s <= 3; ++s) {
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
          const auto si = static_cast<std::size_t>(s);
          CHECK(rel(t.Q2[si][static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], L(s, i, k),
                    scale_L) <= 1e-8);
          CHECK(L(s, i, k) == L(s, k, i));
        }
      }
    }
    // Scalar second moment: n_0 m theta delta_ik + J_0^i J_0^k / n_0.
    const double mt = params.m_theta();
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        const double expected = (i == k ? st.n[0] * mt : 0.0) + st.J[0][i] * st.J[0][k] / st.n[0];
        CHECK(std::abs(t.Q2[0][i][k] - expected) <= 1e-8 * (st.n[0] * mt + 1.0));
      }
    }
  }
}

TEST_CASE("mixedness worked example") {
  const PhysParams params;
  MomentState st;
  st.n = {1.0, 0.1, 0.0, 0.0};
  st.J[1] = {0.1, 0.0};
  const MixednessReport rep = mixedness_check(st, params);
  CHECK(rep.ratio == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(rep.kinetic == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(rep.bound - 0.75) <= 1e-12);
  CHECK(rep.margin == doctest::Approx(0.74).epsilon(1e-13));
  CHECK(rep.strongly_mixed());
}

TEST_CASE("mixedness edge cases") {
  const PhysParams params;
  MomentState st;
  st.n = {1.0, 0.0, 0.0, 0.0};
  MixednessReport rep = mixedness_check(st, params);
  CHECK(rep.ratio == 0.0);
  CHECK(rep.bound == 1.0);

  st.n = {2.0, 0.5, 0.5, 0.0};
  st.J[0] = {1.0, 1.0};
  st.J[1] = {0.25, 0.25};
  st.J[2] = {0.25, 0.25};
  rep = mixedness_check(st, params);
  CHECK(rep.kinetic == 0.0);
  CHECK(rep.bound == 1.0);

  st.n[3] = 0.0;
  st.J[3] = {0.1, 0.0};
  CHECK_THROWS_AS(mixedness_check(st, params), DomainError);

  // Pure state: |n_vec| = n_0.
  MomentState pure;
  pure.n = {1.0, 0.6, 0.0, 0.8};
  rep = mixedness_check(pure, params);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(rep.strongly_mixed());
  CHECK_FALSE(rep.necessary_condition_holds());
}

TEST_CASE("params validation names the field") {
  PhysParams p;
  p.theta = 0.0;
  try {
    p.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("theta") != std::string::npos);
  }
}
