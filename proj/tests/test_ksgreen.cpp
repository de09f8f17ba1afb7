#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ispec/ksgreen.hpp"
#include "ispec/xform.hpp"

using namespace ispec;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Direct trigonometric series for nu = 1/2.
cplx half_series(double x, double X, cplx z, int N) {
  cplx s = 0.0;
  for (int n = N; n >= 1; --n) s += std::sin(n * kPi * x) * std::sin(n * kPi * X) / (z * z - n * n * kPi * kPi);
  return s / std::sqrt(x * X);
}

}  // namespace

TEST_CASE("KS at nu = 1/2 against the trigonometric closed form") {
  const auto v = ks_evaluate({{0}, 0.3, 0.7, 2.5, 400});
  CHECK(v.residual <= 1e-8);
  const cplx cf = ks_half_closed_form(0.3, 0.7, 2.5);
  CHECK(std::abs(v.rhs - cf) <= 1e-10);
  CHECK(std::abs(cf + std::sin(0.75) * std::sin(0.75) / (5 * std::sin(2.5) * std::sqrt(0.21))) <= 1e-14);

  auto raw = ks_evaluate({{0}, 0.3, 0.7, 2.5, 50, TailMode::none});
  CHECK(std::abs(raw.lhs - half_series(0.3, 0.7, 2.5, 50)) <= 1e-13);

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 20; ++k) {
    double x = u(rng), X = u(rng);
    if (x > X) std::swap(x, X);
    const double z = 0.2 + 12 * u(rng);
    if (std::abs(std::sin(z)) < 1e-2) continue;
    CHECK(std::abs(ks_rhs({0}, x, X, z) - ks_half_closed_form(x, X, z)) <= 1e-10 * (1 + std::abs(ks_half_closed_form(x, X, z))));
  }
  for (cplx z : {cplx(2, 1), cplx(0.5, -2)}) {
    const auto c = ks_evaluate({{0}, 0.25, 0.6, z, 400});
    CHECK(std::abs(c.rhs - ks_half_closed_form(0.25, 0.6, z)) <= 1e-10);
    CHECK(c.residual <= 1e-8);
  }
}

TEST_CASE("KS edge cases and convergence") {
  const auto z0 = ks_evaluate({{1}, 0.0, 0.4, 3.3, 400});
  CHECK(z0.lhs == cplx(0.0));
  CHECK(z0.rhs == cplx(0.0));

  const auto a = ks_evaluate({{1}, 0.5, 0.5, 1.7, 800});
  CHECK(a.residual <= 1e-7);
  const auto b = ks_evaluate({{1}, 0.5, 0.5, 1.7, 1600});
  CHECK(std::abs(a.lhs - b.lhs) < 1e-9);
  const auto r = ks_evaluate({{1}, 0.5, 0.5, 1.7, 800, TailMode::none});
  CHECK(r.residual > 1e-5);

  CHECK_THROWS_AS(ks_evaluate({{0}, 0.3, 0.7, kPi + 1e-4, 400}), std::domain_error);
  CHECK_THROWS_AS(ks_evaluate({{0}, 0.7, 0.3, 2.0, 400}), std::domain_error);
}

TEST_CASE("KS sweep") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  int done = 0;
  while (done < 30) {
    double x = u(rng), X = u(rng);
    if (x > X) std::swap(x, X);
    const KSQuery q{{done % 3}, x, X, 0.3 + 10 * u(rng), 400};
    KSValue v;
    try {
      v = ks_evaluate(q);
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK(v.residual <= 1e-8);
    auto q2 = q;
    q2.n_terms = 800;
    CHECK(std::abs(ks_evaluate(q2).lhs - v.lhs) < 1e-9);
    ++done;
  }
  const auto csv = ks_csv({{{0}, 0.3, 0.7, 2.5, 10}});
  CHECK(csv.rfind("ell,x,X", 0) == 0);
}

TEST_CASE("Green identity") {
  const auto g = Grid::standard();
  const auto zero = sample(g, [](double) { return 0.0; });
  const auto gz = green_evaluate({1}, zero, 2.0);
  CHECK(std::abs(gz.lhs) == 0.0);
  CHECK(std::abs(gz.rhs) == 0.0);

  for (int l = 0; l <= 2; ++l) {
    const auto f = sample(g, [](double x) { return std::exp(-x) * (1 + std::sin(4 * x)); });
    CHECK(green_residual({l}, f, 2.3) <= 1e-7);
    CHECK(green_residual({l}, f, cplx(1.5, 0.7)) <= 1e-7);
  }

  // single mode: zeta = J(j_1 x)^2; the n = 1 term is the largest
  const Order o{1};
  const double j1 = bessel_zero(o, 1);
  const auto single = sample(g, [&](double x) { return std::pow(bessel_half(o, Branch::plus_nu, j1 * x), 2); });
  const double z = 2.2;
  const auto gv = green_evaluate(o, single, z);
  CHECK(gv.residual <= 1e-7);
  double biggest = 0.0, first = 0.0;
  for (int n = 1; n <= 30; ++n) {
    const double j = bessel_zero(o, n), d = bessel_half_deriv(o, j);
    const double t = std::abs(bessel_moment(o, single, j) / ((z * z - j * j) * d * d));
    if (n == 1) first = t;
    biggest = std::max(biggest, t);
  }
  CHECK(first == biggest);
  CHECK(first > 0.5 * std::abs(gv.lhs));
}

TEST_CASE("Green identity for a projected zeta") {
  // zeta orthogonal to x J(j_n x)^2 for n <= N and to the constants.
  const auto g = Grid::standard();
  const Order o{0};
  const int N = 24;
  std::vector<GridFn> basis{sample(g, [](double) { return 1.0; })};
  for (int n = 1; n <= N; ++n) {
    const double j = bessel_zero(o, n);
    basis.push_back(sample(g, [&](double x) { return std::pow(bessel_half(o, Branch::plus_nu, j * x), 2); }));
  }
  auto zeta = sample(g, [](double x) { return x * x * (1 - x) * (1 - x) * std::cos(3 * x); });
  auto constraint = [&](const GridFn& f, int k) {
    if (k == 0) return integrate(f);
    return bessel_moment(o, f, bessel_zero(o, k));
  };
  Eigen::MatrixXd G(N + 1, N + 1);
  Eigen::VectorXd rhs(N + 1);
  for (int k = 0; k <= N; ++k) {
    rhs(k) = constraint(zeta, k);
    for (int i = 0; i <= N; ++i) G(k, i) = constraint(basis[i], k);
  }
  const Eigen::VectorXd c = G.colPivHouseholderQr().solve(rhs);
  for (int i = 0; i <= N; ++i) zeta = zeta - c(i) * basis[i];
  for (int k = 0; k <= N; ++k) CHECK(std::abs(constraint(zeta, k)) <= 1e-12);
  const auto v = green_evaluate(o, zeta, 1.9);
  CHECK(std::abs(v.lhs) <= 1e-6);
  CHECK(std::abs(v.rhs) <= 1e-6);
  CHECK(v.residual <= 1e-7);
}

TEST_CASE("moment functional") {
  const auto g = Grid::standard();
  const auto one = sample(g, [](double) { return 1.0; });
  CHECK(moment_functional({0}, one).moment == doctest::Approx(1.0 / 6).epsilon(1e-13));
  for (int l = 0; l <= 2; ++l) {
    const double p = 2 * (l + 0.5);
    const double c = (1 / (p + 2) - 1 / (2 * p + 2)) / (0.5 - 1 / (p + 2));
    const auto f = sample(g, [&](double x) { return std::pow(x, p) - c; });
    CHECK(std::abs(moment_functional({l}, f).moment) <= 1e-12);
  }
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 10; ++k) {
    const double a = u(rng), b = u(rng), cc = u(rng);
    const auto f = sample(g, [&](double x) { return 1 + a * x + b * std::sin(3 * x) + cc * x * x; });
    const Order o{k % 3};
    const auto m3 = moment_functional(o, f, 1e-3);
    const auto m2 = moment_functional(o, f, 1e-2);
    CHECK(std::abs(m3.green_limit / m3.moment - 1) <= 1e-2);
    // the z^2 correction shrinks by 100 between z = 1e-2 and 1e-3
    const double extrap = (100 * m3.green_limit - m2.green_limit) / 99;
    CHECK(std::abs(extrap - m3.moment) <= std::abs(m3.green_limit - m3.moment));
  }
}

TEST_CASE("reduced identity") {
  const auto g = Grid::standard();
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int l = 0; l <= 3; ++l) {
    const double a = u(rng), b = u(rng);
    auto f = sample(g, [&](double x) { return a * std::cos(2 * x) + b * x * x * x + std::sin(5 * x); });
    f = f - integrate(f) * sample(g, [](double) { return 1.0; });
    CHECK(reduced_identity_residual(l, f, 3.2) <= 1e-8);
    CHECK(reduced_identity_residual(l, f, cplx(2.0, 0.5)) <= 1e-8);
    if (l == 0) {
      const auto c = sample(g, [](double x) { return std::cos(3.2 * (2 * x - 1)); });
      CHECK(std::abs(reduced_identity_direct(0, f, 3.2) - inner(f, c)) <= 1e-14);
    } else {
      const double z = 1e-4;
      const double lead = p_polynomial(l).re.back().value();
      const double t_int = integrate(apply({OpFamily::T, l}, f));
      const cplx scaled = std::pow(z, l) * reduced_identity_direct(l, f, z);
      CHECK(std::abs(scaled - lead * t_int) <= 1e-6 * (1 + std::abs(lead * t_int)));
    }
  }
}
