#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ispec/special_fn.hpp"
#include "ispec/xform.hpp"

using namespace ispec;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridFn random_smooth(const GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), k = 1 + 3 * std::abs(u(rng));
  return sample(g, [=](double t) { return a + b * t + c * std::cos(k * t) + d * std::sin(2.7 * t * t); });
}

double sup_diff(const GridFn& a, const GridFn& b) { return max_abs(a - b); }
double l2_diff(const GridFn& a, const GridFn& b) { return l2_norm(a - b); }

}  // namespace

TEST_CASE("S_1 on t") {
  const auto g = Grid::standard();
  const auto t = sample(g, [](double x) { return x; });
  const auto s = apply_S(1, t);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i);
    CHECK(std::abs(s[i] - x * (1 + 4 * std::log(x))) <= 1e-12);
  }
}

TEST_CASE("T_0 is the identity and A_1 inverts S_1") {
  const auto g = Grid::standard();
  std::mt19937 rng(5);
  for (int k = 0; k < 5; ++k) {
    const auto f = random_smooth(g, rng);
    CHECK(apply({OpFamily::T, 0}, f).values == f.values);
    CHECK(l2_diff(apply_invA(1, apply_S(1, f)), f) <= 1e-9);
  }
  CHECK_THROWS(apply({OpFamily::S, 9}, sample(g, [](double) { return 1.0; })));
}

TEST_CASE("explicit T_2") {
  const auto g = Grid::standard();
  const auto x2 = sample(g, [](double x) { return x * x; });
  const auto t = t2_explicit(x2);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i);
    CHECK(std::abs(t[i] - (-12 * x + 35 * x * x - 24 * x * x * x)) <= 1e-12);
  }
  const auto zero = sample(g, [](double) { return 0.0; });
  CHECK(max_abs(t2_explicit(zero)) == 0.0);
  std::mt19937 rng(9);
  for (int k = 0; k < 3; ++k) {
    const auto f = random_smooth(g, rng);
    CHECK(l2_diff(t2_explicit(f), apply({OpFamily::T, 2}, f)) <= 1e-9);
  }
}

TEST_CASE("ODE residuals") {
  const auto g = Grid::standard();
  CHECK(ode_residual_S(1, sample(g, [](double x) { return x * x * x; })) <= 1e-7);
  CHECK(ode_residual_S(1, sample(g, [](double x) { return std::sin(x); })) <= 1e-6);
  CHECK(ode_residual_S(2, sample(g, [](double x) { return std::pow(x, 5); })) <= 1e-6);
  CHECK(ode_residual_Sadj(1, sample(g, [](double x) { return std::pow(x, 4); })) <= 1e-6);
  CHECK(ode_residual_Sadj(1, sample(g, [](double) { return 2.0; })) <= 1e-8);
  CHECK(ode_residual_Sadj(1, sample(g, [](double x) { return x; })) <= 1e-8);
  CHECK_THROWS(ode_residual_Sadj(2, sample(g, [](double x) { return x; })));
  CHECK_THROWS(ode_residual_S(3, sample(g, [](double x) { return x; })));
}

TEST_CASE("adjointness, range orthogonality, commutation") {
  const auto g = Grid::standard();
  std::mt19937 rng(21);
  for (int l = 1; l <= 4; ++l) {
    const auto x2l = sample(g, [l](double x) { return std::pow(x, 2 * l); });
    for (int k = 0; k < 50; ++k) {
      const auto f = random_smooth(g, rng), h = random_smooth(g, rng);
      CHECK(std::abs(inner(apply_S(l, f), h) - inner(f, apply_S_adj(l, h))) <= 1e-10);
      if (k < 10) CHECK(std::abs(inner(x2l, apply_S(l, f))) <= 1e-10);
    }
  }
  for (int l = 1; l <= 3; ++l)
    for (int m = l + 1; m <= 3; ++m) {
      const auto f = random_smooth(g, rng);
      CHECK(l2_diff(apply_S(l, apply_S(m, f)), apply_S(m, apply_S(l, f))) <= 1e-9);
    }
}

TEST_CASE("kernel of T_l*") {
  const auto g = Grid::standard();
  for (int l = 1; l <= 4; ++l)
    for (int k = 1; k <= l; ++k) {
      const auto f = sample(g, [k](double x) { return std::pow(x, 2 * k); });
      CHECK(l2_norm(apply({OpFamily::T_adj, l}, f)) <= 1e-9);
    }
}

TEST_CASE("index reduction of Phi and Psi") {
  const auto g = Grid::standard();
  for (double z : {1.0, 5.0, bessel_zero({1}, 3)})
    for (int l = 1; l <= 3; ++l) {
      const auto phi = sample(g, [&](double x) { return phi_psi(l, z * x).phi; });
      const auto phim = sample(g, [&](double x) { return phi_psi(l - 1, z * x).phi; });
      const auto psi = sample(g, [&](double x) { return phi_psi(l, z * x).psi; });
      const auto psim = sample(g, [&](double x) { return phi_psi(l - 1, z * x).psi; });
      CHECK(sup_diff(phi, -1.0 * apply_S_adj(l, phim)) <= 1e-9);
      CHECK(sup_diff(psi, -1.0 * apply_S_adj(l, psim)) <= 1e-9);
    }
}

TEST_CASE("trigonometric transfer and B_l inverse") {
  const auto g = Grid::standard();
  std::mt19937 rng(33);
  for (int l = 1; l <= 3; ++l)
    for (double z : {2.0, 7.3}) {
      const auto zeta = random_smooth(g, rng);
      const auto tz = apply({OpFamily::T, l}, zeta);
      const auto lhs1 = sample(g, [&](double x) { return 2 * phi_psi(l, z * x).phi - 1; });
      const auto c2 = sample(g, [&](double x) { return std::cos(2 * z * x); });
      CHECK(std::abs(inner(lhs1, zeta) - inner(c2, tz)) <= 1e-9);
      const auto psi = sample(g, [&](double x) { return phi_psi(l, z * x).psi; });
      const auto s2 = sample(g, [&](double x) { return std::sin(2 * z * x); });
      CHECK(std::abs(inner(psi, zeta) + 0.5 * inner(s2, tz)) <= 1e-9);
    }
  for (int l = 1; l <= 3; ++l) {
    const auto f = random_smooth(g, rng);
    CHECK(l2_diff(apply({OpFamily::B, l}, apply({OpFamily::T, l}, f)), f) <= 1e-8);
  }
}
