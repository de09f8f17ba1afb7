#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ispec/linmap.hpp"

using namespace ispec;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridFn random_zeta(const GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double a = u(rng), b = u(rng), c = u(rng);
  return sample(g, [=](double x) { return a + b * std::cos(3 * x) + c * x * x; });
}

}  // namespace

TEST_CASE("spectral map") {
  const auto g = Grid::standard();
  const auto z = spectral_map({0, 1}, Potential::zero(g), 8);
  CHECK(z.mean == 0.0);
  for (double v : z.seq1) CHECK(std::abs(v) <= 1e-6);
  for (int n = 1; n <= 8; ++n) {
    const double j = bessel_zero({1}, n);
    CHECK(z.seq2[n - 1] == doctest::Approx(j * j - std::pow(n + 0.5, 2) * kPi * kPi + 2).epsilon(1e-6));
  }
  const auto c = spectral_map({0, 1}, Potential::constant(g, 0.4), 8);
  CHECK(c.mean == doctest::Approx(0.4).epsilon(1e-14));
  for (int n = 0; n < 8; ++n) {
    CHECK(std::abs(c.seq1[n] - z.seq1[n]) <= 1e-7);
    CHECK(std::abs(c.seq2[n] - z.seq2[n]) <= 1e-7);
  }
  CHECK(z.stacked().size() == 17);

  const auto q = Potential::from_fn(g, [](double x) { return 0.05 * std::cos(2 * kPi * x); });
  const auto im = spectral_map({0, 1}, q, 12);
  CHECK(im.stacked().allFinite());
  const auto s1 = spectrum_from_json(to_json(dirichlet_spectrum({0}, q, 12)));
  const auto s2 = spectrum_from_json(to_json(dirichlet_spectrum({1}, q, 12)));
  const auto back = image_from_spectra(s1, s2, q.mean());
  CHECK((back.stacked() - im.stacked()).norm() <= 1e-12);
}

TEST_CASE("d0 rows") {
  const auto g = Grid::standard();
  const auto L = d0_rows({0, 1}, 40, g);
  CHECK(L.matrix.rows() == 81);
  const auto one = sample(g, [](double) { return 1.0; });
  CHECK(L.apply(one)(0) == doctest::Approx(1.0).epsilon(1e-14));
  for (Eigen::Index i = 0; i < L.matrix.cols(); ++i) CHECK(L.matrix(0, i) == g->weight(i));
  CHECK((L.A + L.K - L.matrix).cwiseAbs().maxCoeff() <= 1e-15);
  // l = 0 rows are -cos(2 n pi x)
  double worst = 0.0;
  for (int n = 1; n <= 40; ++n)
    for (Eigen::Index i = 0; i < L.matrix.cols(); ++i)
      worst = std::max(worst, std::abs(L.matrix(n, i) / g->weight(i) + std::cos(2 * n * kPi * g->node(i))));
  CHECK(worst <= 1e-10);
  // K rows are square summable
  std::vector<double> partial;
  double acc = 0.0;
  for (int n = 1; n <= 40; ++n) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < L.K.cols(); ++i) s += std::pow(L.K(40 + n, i), 2) / g->weight(i);
    acc += s;
    partial.push_back(acc);
  }
  for (int n = 30; n < 40; ++n) CHECK(partial[n] - partial[n - 1] < 1e-4);
}

TEST_CASE("d0 rows against finite differences") {
  const auto g = Grid::standard();
  const int N = 5;
  const double eps = 1e-5;
  std::mt19937 rng(31);
  for (int c = 0; c < 10; ++c) {
    const Pair p{0, 1 + c % 2};
    const auto L = d0_rows(p, N, g);
    const auto z = random_zeta(g, rng);
    const Eigen::VectorXd d = L.apply(z);
    const Eigen::VectorXd fp = spectral_map(p, Potential(eps * z), N).stacked();
    const Eigen::VectorXd fm = spectral_map(p, Potential((-eps) * z), N).stacked();
    const Eigen::VectorXd fd = (fp - fm) / (2 * eps);
    for (Eigen::Index k = 0; k < d.size(); ++k) CHECK(std::abs(fd(k) - d(k)) <= 1e-4 * std::max(1.0, std::abs(d(k))));
  }
}

TEST_CASE("kernel probes") {
  for (int panels : {64, 48}) {
    const auto g = Grid::standard(panels);
    CHECK(kernel_probe({0, 1}, 40, g).kernel_dim_estimate == 0);
    CHECK(kernel_probe({0, 2}, 40, g).kernel_dim_estimate == 0);
    CHECK(kernel_probe({0, 5}, 40, g).kernel_dim_estimate == kernel_probe({0, 5}, 30, g).kernel_dim_estimate);
  }
  // more trial functions than rows leaves a kernel
  const auto g = Grid::standard();
  CHECK(kernel_probe({0, 1}, 3, g, 10).kernel_dim_estimate >= 3);
}

TEST_CASE("reconstruction") {
  const auto g = Grid::standard();
  const auto zero = spectral_map({0, 1}, Potential::zero(g), 6);
  const auto r0 = reconstruct({0, 1}, zero, g);
  CHECK(r0.report.misfit_history.front() <= 1e-10);
  CHECK(r0.report.iterations == 0);
  CHECK(max_abs(r0.q_hat.values()) == 0.0);

  const auto qs = sample(g, [](double x) { return 0.05 * std::cos(2 * kPi * x); });
  const auto t1 = spectral_map({0, 1}, Potential(qs), 12);
  const auto r1 = reconstruct({0, 1}, t1, g, {}, &qs);
  CHECK(r1.report.q_error <= 5e-3);
  CHECK(r1.report.converged);
  for (std::size_t i = 1; i < r1.report.misfit_history.size(); ++i)
    CHECK(r1.report.misfit_history[i] < r1.report.misfit_history[i - 1]);
  CHECK(r1.report.to_json().find("\"misfit_history\"") != std::string::npos);

  // shifting the mean shifts the answer
  auto t1c = t1;
  t1c.mean += 0.2;
  const auto r1c = reconstruct({0, 1}, t1c, g);
  CHECK(l2_norm(r1c.q_hat.values() - r1.q_hat.values() - sample(g, [](double) { return 0.2; })) <= 2e-3);

  const auto q2 = sample(g, [](double x) { return 0.03 * (x - 0.5); });
  const auto t2 = spectral_map({0, 2}, Potential(q2), 16);
  const auto r2 = reconstruct({0, 2}, t2, g, {}, &q2);
  CHECK(r2.report.q_error <= 1e-2);
  for (std::size_t i = 1; i < r2.report.misfit_history.size(); ++i)
    CHECK(r2.report.misfit_history[i] < r2.report.misfit_history[i - 1]);

  SpectralImage bad;
  bad.seq1 = {1.0};
  CHECK_THROWS_AS(reconstruct({0, 1}, bad, g), std::invalid_argument);
}
