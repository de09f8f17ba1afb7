#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ispec/funcspace.hpp"

using namespace ispec;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("grid layout") {
  const auto g = Grid::standard();
  CHECK(g->size() == (64u + 2u * Grid::kDefaultEndLevels) * 12u);
  double s = 0.0;
  for (double w : g->weights()) {
    CHECK(w > 0.0);
    s += w;
  }
  CHECK(std::abs(s - 1.0) <= 1e-14);
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->node(i) > g->node(i - 1));
  CHECK(g->node(0) > 0.0);
  CHECK(g->node(g->size() - 1) < 1.0);
  CHECK(g->node(0) < 1e-7);
  CHECK(Grid::standard(64, 12, 0)->node(0) < 1e-5);
  CHECK(g->symmetric());
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(g->node(i) + g->node(g->mirror()[i]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g->weight(i) == g->weight(g->mirror()[i]));
  }
  CHECK(Grid::standard()->hash() == g->hash());
  CHECK(Grid::standard(32)->hash() != g->hash());
}

TEST_CASE("inner products") {
  const auto g = Grid::standard();
  const auto one = sample(g, [](double) { return 1.0; });
  const auto x = sample(g, [](double t) { return t; });
  CHECK(inner(one, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inner(x, one) == doctest::Approx(0.5).epsilon(1e-14));
  const auto s = sample(g, [](double t) { return std::sin(2 * kPi * t); });
  const auto c = sample(g, [](double t) { return std::cos(2 * kPi * t); });
  CHECK(std::abs(inner(s, c)) <= 1e-12);
}

TEST_CASE("quadrature exactness on per-panel polynomials") {
  const auto g = Grid::standard();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const int m = g->nodes_per_panel();
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> coef(g->panel_count(), std::vector<double>(2 * m));
    double exact = 0.0;
    for (int p = 0; p < g->panel_count(); ++p) {
      const double a = g->edges()[p], b = g->edges()[p + 1];
      for (int k = 0; k < 2 * m; ++k) {
        coef[p][k] = u(rng);
        // monomials in the local variable s in [-1,1]
        exact += coef[p][k] * (k % 2 == 0 ? 2.0 / (k + 1) : 0.0) * 0.5 * (b - a);
      }
    }
    GridFn f(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const int p = static_cast<int>(i) / m;
      const double a = g->edges()[p], b = g->edges()[p + 1];
      const double sl = (2 * g->node(i) - a - b) / (b - a);
      double v = 0.0;
      for (int k = 2 * m - 1; k >= 0; --k) v = v * sl + coef[p][k];
      f[i] = v;
    }
    CHECK(std::abs(integrate(f) - exact) <= 1e-13);
  }
}

TEST_CASE("reflection and parity") {
  const auto g = Grid::standard();
  const auto x = sample(g, [](double t) { return t; });
  const auto rx = reflect(x);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(rx[i] == doctest::Approx(1 - g->node(i)).epsilon(1e-15));
  const auto sp = sample(g, [](double t) { return std::sin(kPi * t); });
  const auto rsp = reflect(sp);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(rsp[i] - sp[i]) < 1e-14);
  const auto odd = sample(g, [](double t) { return 2 * t - 1; });
  const auto rodd = reflect(odd);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(rodd[i] + odd[i]) < 1e-14);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  GridFn r(g);
  for (auto& v : r.values) v = u(rng);
  CHECK(reflect(reflect(r)).values == r.values);
  const auto e = parity_project(r, Parity::even), o = parity_project(r, Parity::odd);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(e[i] + o[i] == doctest::Approx(r[i]).epsilon(1e-15));
  CHECK(std::abs(inner(e, o)) <= 1e-12);
  GridFn r2(g);
  for (auto& v : r2.values) v = u(rng);
  CHECK(std::abs(inner(r, r2) - inner(reflect(r), reflect(r2))) <= 1e-13);

  const auto xe = parity_project(x, Parity::even), xo = parity_project(x, Parity::odd);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(xe[i] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(xo[i] - (g->node(i) - 0.5)) < 1e-15);
  }
  const auto cosb = sample(g, [](double t) { return std::cos(kPi * (2 * t - 1)); });
  CHECK(max_abs(parity_project(cosb, Parity::odd)) <= 1e-14);

  CHECK_THROWS(reflect(sample(Grid::uniform(0.1, 0.8, 3, 6), [](double t) { return t; })));
}

TEST_CASE("differentiation") {
  // Wide panels keep the roundoff floor eps * |f| / h^k below the tolerances.
  const auto g = Grid::uniform(0.0, 1.0, 4, 12);
  const auto x3 = sample(g, [](double t) { return t * t * t; });
  const auto d2 = differentiate(x3, 2);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(d2[i] - 6 * g->node(i)) <= 1e-10);
  const auto s2 = sample(g, [](double t) { return std::sin(2 * t); });
  const auto ds = differentiate(s2, 1);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(ds[i] - 2 * std::cos(2 * g->node(i))) <= 1e-8);
  const auto c = sample(g, [](double) { return 3.0; });
  CHECK(max_abs(differentiate(c, 1)) <= 1e-10);
  CHECK_THROWS(differentiate(c, 12));
  CHECK(eval_at(x3, 0.37) == doctest::Approx(0.37 * 0.37 * 0.37).epsilon(1e-14));
  CHECK(eval_at(x3, 0.37, 1) == doctest::Approx(3 * 0.37 * 0.37).epsilon(1e-11));
}

TEST_CASE("differentiation on the graded grid away from the ends") {
  const auto g = Grid::standard();
  const auto s2 = sample(g, [](double t) { return std::sin(2 * t); });
  const auto ds = differentiate(s2, 1);
  for (std::size_t i = 0; i < g->size(); ++i)
    if (g->node(i) > 0.05 && g->node(i) < 0.95) CHECK(std::abs(ds[i] - 2 * std::cos(2 * g->node(i))) <= 1e-8);
}

TEST_CASE("csv round trip") {
  const auto g = Grid::standard(16, 6);
  const auto f = sample(g, [](double t) { return std::exp(t); });
  const auto txt = to_csv(f);
  CHECK(txt.rfind("# grid=", 0) == 0);
  const auto back = from_csv(txt, g);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(back[i] == f[i]);
  CHECK_THROWS(from_csv(txt, Grid::standard(18, 6)));
  const auto lin = from_csv_points("x,q\n0,0\n1,2\n", g);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(lin[i] == doctest::Approx(2 * g->node(i)));
}
