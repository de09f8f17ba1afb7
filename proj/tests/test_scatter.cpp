#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ispec/scatter.hpp"

using namespace ispec;

namespace {

constexpr double kPi = 3.14159265358979323846;

Potential random_potential(const GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-3, 3);
  const double a = u(rng), b = u(rng), c = u(rng), k = 1 + std::abs(u(rng));
  return Potential::from_fn(g, [=](double x) { return a + b * std::cos(k * kPi * x) + c * x * x; });
}

}  // namespace

TEST_CASE("free regular solution at r = 1") {
  for (cplx l : {cplx(30), cplx(-4), cplx(5, 3), cplx(200), cplx(0.5, -0.2)}) {
    const cplx k = std::sqrt(l);
    CHECK(std::abs(phi0_reference({0}, l) - std::sin(k) / k) <= 1e-14 * std::max(1.0, std::abs(std::sin(k) / k)));
  }
  CHECK(phi0_reference({0}, 0.0) == cplx(1.0));
  CHECK(std::abs(phi0_reference({0}, 1e-9) - 1.0) <= 1e-9);
  for (int l = 0; l <= 3; ++l) {
    CHECK(phi0_reference({l}, 0.0) == cplx(1.0));
    for (int n = 1; n <= 10; ++n) {
      const double j = bessel_zero({l}, n);
      CHECK(std::abs(phi0_reference({l}, j * j)) <= 1e-10);
    }
  }
  // the solver's regular solution at q = 0
  const auto g = Grid::standard();
  const auto z = Potential::zero(g);
  for (int l = 0; l <= 2; ++l)
    for (cplx lam : {cplx(-4), cplx(17), cplx(3, 2)}) {
      const cplx ref = phi0_reference({l}, lam);
      CHECK(std::abs(endpoint({l}, lam, z).first - ref) <= 1e-10 * std::abs(ref));
    }
}

TEST_CASE("Hadamard product, free potential") {
  const auto g = Grid::standard();
  const auto z = Potential::zero(g);
  const auto s = dirichlet_spectrum({0}, z, 500);
  for (cplx l : {cplx(30), cplx(-4), cplx(5, 3), cplx(200)}) {
    const auto r = hadamard_report({0}, z, s, l, 500);
    CHECK(r.residual <= 1e-6);
    CHECK(r.m == 0);
    const cplx k = std::sqrt(l);
    CHECK(std::abs(r.product_ratio - (std::sin(k) / k) / (std::sinh(1.0) / 1.0)) <= 1e-6 * std::abs(r.product_ratio));
  }
  CHECK(hadamard_check({1}, z, -4.0, 200) <= 1e-4);
  CHECK_THROWS_AS(hadamard_report({0}, z, s, s.eigenvalues[3], 100), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_report({0}, z, s, 1.0, 501), std::invalid_argument);
}

TEST_CASE("Hadamard product, smooth potentials") {
  const auto g = Grid::standard();
  const auto q = Potential::from_fn(g, [](double x) { return 1 + 2 * std::cos(2 * kPi * x); });
  for (int l : {0, 1}) {
    const auto s = dirichlet_spectrum({l}, q, 200);
    for (cplx lam : {cplx(-4), cplx(30), cplx(5, 3)}) CHECK(hadamard_report({l}, q, s, lam, 200).residual <= 1e-4);
    // truncation dominates at N = 20; the reference point hardly matters
    std::vector<double> res;
    for (double ref : {-1.0, -2.0, -5.0}) res.push_back(hadamard_report({l}, q, s, 30.0, 20, ref).residual);
    const double lo = *std::min_element(res.begin(), res.end()), hi = *std::max_element(res.begin(), res.end());
    CHECK(hi < 2 * lo);
    CHECK(hadamard_report({l}, q, s, 30.0, 50).residual < hadamard_report({l}, q, s, 30.0, 10).residual);
  }
  // a zero eigenvalue
  const auto shifted = Potential::constant(g, -kPi * kPi);
  const auto r = hadamard_report({0}, shifted, dirichlet_spectrum({0}, shifted, 200), cplx(-4, 1), 200);
  CHECK(r.m == 1);
  CHECK(r.residual <= 1e-4);
}

TEST_CASE("reflected potentials share the l = 0 product") {
  const auto g = Grid::standard();
  const auto q1 = Potential::from_fn(g, [](double x) { return 3 * x * x + std::sin(5 * x); });
  const auto q2 = Potential::from_fn(g, [](double x) { return 3 * (1 - x) * (1 - x) + std::sin(5 * (1 - x)); });
  const auto s1 = dirichlet_spectrum({0}, q1, 100), s2 = dirichlet_spectrum({0}, q2, 100);
  for (int n = 0; n < 100; ++n) CHECK(std::abs(s1.eigenvalues[n] - s2.eigenvalues[n]) <= 1e-9 * s1.eigenvalues[n]);
  for (cplx lam : {cplx(7), cplx(-3), cplx(2, 4)}) {
    const auto a = hadamard_report({0}, q1, s1, lam, 100), b = hadamard_report({0}, q2, s2, lam, 100);
    CHECK(std::abs(a.product_ratio - b.product_ratio) <= 1e-9 * std::abs(a.product_ratio));
    CHECK(std::abs(a.solver_ratio - b.solver_ratio) <= 1e-9 * std::abs(a.solver_ratio));
  }
  // phi(1) agrees but phi'(1) does not, and sigma follows phi'(1)
  const auto j1 = jost_match({0}, q1), j2 = jost_match({0}, q2);
  CHECK(std::abs(j1.phi1 - j2.phi1) <= 1e-10);
  CHECK(std::abs(j1.dphi1 - j2.dphi1) > 1e-2);
  CHECK(std::abs(j1.sigma - j2.sigma) > 1e-2);
}

TEST_CASE("Jost functions at lambda = 1") {
  const auto g = Grid::standard();
  for (int l = 0; l <= 4; ++l) {
    const auto f = jost_solutions({l});
    CHECK(std::abs(f.wronskian() - cplx(0, -2)) <= 1e-12);
  }
  const auto z = Potential::zero(g);
  for (int l = 0; l <= 2; ++l) {
    const auto d = jost_match({l}, z);
    CHECK(std::abs(d.sigma - 1.0) <= 1e-10);
    CHECK(d.wronskian_check <= 1e-12);
  }
  std::mt19937 rng(17);
  for (int c = 0; c < 10; ++c) {
    const auto q = random_potential(g, rng);
    for (int l : {0, 1, 2}) {
      const auto d = jost_match({l}, q);
      CHECK(std::abs(std::abs(d.sigma) - 1.0) <= 1e-8);
      CHECK(std::abs(d.beta - std::conj(d.alpha)) <= 1e-12 * std::abs(d.alpha));
      CHECK(std::abs(d.alpha) > 0.0);
    }
  }
  // a constant shift changes the phase
  CHECK(std::abs(jost_match({0}, Potential::constant(g, 0.5)).sigma - 1.0) > 1e-3);
  const auto js = to_json(jost_match({1}, z));
  for (const char* key : {"\"ell\": 1", "\"alpha_re\"", "\"alpha_im\"", "\"sigma_re\"", "\"sigma_im\"", "\"wronskian_check\""})
    CHECK(js.find(key) != std::string::npos);
}
