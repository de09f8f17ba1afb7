#include "ispec/uniq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "ispec/errors.hpp"
#include "ispec/special_fn.hpp"
#include "ispec/xform.hpp"

namespace ispec {

namespace {

constexpr double kPi = 3.14159265358979323846;
namespace odeint = boost::numeric::odeint;

// Integrates y' = sys(x, y) from x0 through the monotone points xs and returns
// the state at each of them.
template <std::size_t N, class Sys>
std::vector<std::array<double, N>> solve_at(Sys sys, std::array<double, N> y, double x0,
                                            const std::vector<double>& xs, double rtol = 1e-13,
                                            double atol = 1e-300) {
  using State = std::array<double, N>;
  std::vector<double> times{x0};
  times.insert(times.end(), xs.begin(), xs.end());
  std::vector<State> out;
  out.reserve(xs.size());
  bool first = true;
  auto obs = [&](const State& s, double) {
    if (first) {
      first = false;
      return;
    }
    for (double v : s)
      if (!std::isfinite(v)) throw SolverError("non-finite state in singular ODE");
    out.push_back(s);
  };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(atol, rtol);
  const double dt = (xs.empty() ? 1e-3 : (xs.front() > x0 ? 1e-4 : -1e-4)) * std::abs(x0);
  odeint::integrate_times(stepper, sys, y, times.begin(), times.end(), dt, obs);
  if (out.size() != xs.size()) throw SolverError("integration stopped early");
  return out;
}

// Symmetric grid over [x0, 1 - x0] with the standard layout.
GridPtr shoot_grid(double x0) {
  auto e = Grid::standard(64, 12, Grid::kDefaultEndLevels)->edges();
  for (double& v : e) v = x0 + (1 - 2 * x0) * v;
  return Grid::from_edges(std::move(e), 12);
}

double sq(double v) { return v * v; }

}  // namespace

// ---- l = 1 ---------------------------------------------------------------

namespace {

void ode01_coeffs(double x, double& p, double& q) {
  const double a = 1 / x, b = 1 / (1 - x);
  p = 2 * a - 2 * b;
  q = -(2 * a * a + 2 * b * b + 4 * a + 4 * b);
}

}  // namespace

double ode01_residual(const JetFn& y, double x) {
  double p, q;
  ode01_coeffs(x, p, q);
  const Jet j = y(x);
  return j[2] + p * j[1] + q * j[0];
}

ShootResult ode01_shoot(double x0) {
  if (!(x0 > 0 && x0 < 0.1)) throw std::invalid_argument("x0 must lie in (0, 0.1)");
  const GridPtr g = shoot_grid(x0);
  std::vector<double> xs(g->nodes());
  const auto at_half = std::lower_bound(xs.begin(), xs.end(), 0.5) - xs.begin();
  xs.insert(xs.begin() + at_half, 0.5);
  auto sys = [](const std::array<double, 2>& s, std::array<double, 2>& d, double x) {
    double p, q;
    ode01_coeffs(x, p, q);
    d[0] = s[1];
    d[1] = -p * s[1] - q * s[0];
  };
  // y = x + (3/2) x^2 + O(x^3) on the regular branch
  const auto st = solve_at<2>(sys, {x0 + 1.5 * x0 * x0, 1 + 3 * x0}, x0, xs, 1e-12);
  ShootResult r{GridFn(g), 0.0, st[at_half][1] / st[at_half][0]};
  for (std::size_t i = 0, k = 0; i < st.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == at_half) continue;
    r.solution[k++] = st[i][0];
  }
  r.boundary_defect = l2_norm(r.solution - reflect(r.solution)) / l2_norm(r.solution);
  return r;
}

double deff_value(const Jet& y, double x) {
  return -y[2] + (2 - 4 / x) * y[1] + (4 / (x * x) + 8 / x) * y[0];
}

double quadratic_form(const JetFn& y, const GridPtr& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i);
    const Jet j = y(x);
    s += g->weight(i) * (sq(j[1]) + (2 / (x * x) + 8 / x) * sq(j[0]));
  }
  return s;
}

double quadratic_form(const GridFn& y) {
  const GridFn d = differentiate(y, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = y.x(i);
    s += y.grid->weight(i) * (sq(d[i]) + (2 / (x * x) + 8 / x) * sq(y[i]));
  }
  return s;
}

double deff_pairing(const JetFn& y, const GridPtr& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i);
    const Jet j = y(x);
    s += g->weight(i) * deff_value(j, x) * j[0];
  }
  return s;
}

// ---- l = 2 ---------------------------------------------------------------

std::array<double, 5> ode02_coefficients(double x) {
  const double a = 1 / x, b = 1 / (1 - x);
  const double a2 = a * a, b2 = b * b, a3 = a2 * a, b3 = b2 * b, a4 = a3 * a, b4 = b3 * b;
  const double a5 = a4 * a, b5 = b4 * b;
  std::array<double, 5> c;
  c[4] = a + b - 1;
  c[3] = -6 * (a - b);
  c[2] = 12 * (a + b) - 8 * (a3 + b3) - 6 * (a2 + b2);
  c[1] = 24 * (a2 - b2) + 24 * (a4 - b4) + 36 * (a3 - b3);
  c[0] = -(24 * (a3 + b3) + 24 * (a5 + b5) + 36 * (a4 + b4));
  return c;
}

double ode02_residual(const Jet& y, double x) {
  const auto c = ode02_coefficients(x);
  double s = 0.0;
  for (int k = 0; k <= 4; ++k) s += c[k] * y[k];
  return s;
}

EvenSpace ode02_even_space(double x0, double rank_tol) {
  if (!(x0 > 0 && x0 < 0.1)) throw std::invalid_argument("x0 must lie in (0, 0.1)");
  const GridPtr g = shoot_grid(x0);
  const std::size_t n = g->size();
  std::vector<double> xs(g->nodes().begin(), g->nodes().begin() + n / 2);
  xs.push_back(0.5);
  auto sys = [](const std::array<double, 4>& s, std::array<double, 4>& d, double x) {
    const auto c = ode02_coefficients(x);
    d[0] = s[1];
    d[1] = s[2];
    d[2] = s[3];
    d[3] = -(c[3] * s[3] + c[2] * s[2] + c[1] * s[1] + c[0] * s[0]) / c[4];
  };
  std::vector<std::vector<std::array<double, 4>>> sols;
  Eigen::MatrixXd M(2, 3);
  for (int b = 0; b < 3; ++b) {
    const double rho = b == 0 ? 1.0 : b + 2.0;
    std::array<double, 4> s0;
    double f = std::pow(x0, rho), r = rho;
    for (int k = 0; k < 4; ++k) {
      s0[k] = f;
      f = r == 0 ? 0.0 : f * r / x0;
      r -= 1;
    }
    // components that start at zero need an absolute floor
    sols.push_back(solve_at<4>(sys, s0, x0, xs, 1e-13, 1e-13 * s0[0]));
    const auto& h = sols.back().back();
    const double scale = std::sqrt(sq(h[0]) + sq(h[1]) + sq(h[2]) + sq(h[3]));
    for (auto& s : sols.back())
      for (double& v : s) v /= scale;
    M(0, b) = sols.back().back()[1];
    M(1, b) = sols.back().back()[3];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  EvenSpace out;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    out.singular_values.push_back(sv(i));
    const double rel = sv(0) > 0 ? sv(i) / sv(0) : 0.0;
    if (rel > rank_tol) ++rank;
    if (rel > 1e-2 * rank_tol && rel < 1e2 * rank_tol) out.ambiguous = true;
  }
  out.dimension = 3 - rank;
  for (int k = rank; k < 3; ++k) {
    const Eigen::Vector3d c = svd.matrixV().col(k);
    GridFn y(g);
    for (std::size_t i = 0; i < n / 2; ++i) {
      double v = 0.0;
      for (int b = 0; b < 3; ++b) v += c(b) * sols[b][i][0];
      y[i] = v;
      y[n - 1 - i] = v;
    }
    // sign: positive slope at the left end
    const double sgn = y[n / 4] - y[0] >= 0 ? 1.0 : -1.0;
    out.basis.push_back((sgn / l2_norm(y)) * y);
  }
  return out;
}

Jet zeta_jet(double A, double x) {
  return jet_fn([A](auto t) { return zeta_formula(A, t); })(x);
}

ExplicitZeta zeta_explicit(double A, const GridPtr& g) {
  ExplicitZeta z{A, GridFn(g), GridFn(g)};
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Jet j = zeta_jet(A, g->node(i));
    z.values[i] = j[0];
    z.derivative[i] = j[1];
  }
  return z;
}

double obstruction_direct(double A, double x, const GridPtr& g) {
  const GridFn z = zeta_explicit(A, g).values;
  const double i4 = interval_integral(z, -4.0, x, g->upper());
  const double i2 = interval_integral(z, -2.0, x, g->upper());
  const Jet j = zeta_jet(A, x);
  return (288 * x * x * x - 432 * x * x + 144 * x) * i4 + (-144 * x + 72) * i2 - j[2] + 6 * j[1] - 12 * j[0] -
         12 / x * j[1] + 72 / x * j[0] - 48 / (x * x) * j[0];
}

double obstruction_from_t2(double A, double x, const GridPtr& g) {
  const GridFn t = t2_explicit(zeta_explicit(A, g).values);
  return eval_at(t, x, 2) - 6 * eval_at(t, x, 1) + 12 * eval_at(t, x, 0);
}

ObstructionValue obstruction_value(double A) {
  const GridPtr g = Grid::from_env();
  return {obstruction_direct(A, 0.5, g), obstruction_from_t2(A, 0.5, g)};
}

double g_value(const Jet& y, double x) {
  const double a = 1 / x, a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
  return (-288 * a5 - 432 * a4 - 288 * a3) * y[0] + (288 * a4 + 432 * a3 + 288 * a2) * y[1] +
         (-96 * a3 - 72 * a2 + 144 * a) * y[2] + (12 - 72 * a) * y[3] + (-6 + 12 * a) * y[4] + y[5];
}

GIdentity g_identity(const JetFn& y, const GridPtr& g) {
  double scale = 0.0;
  for (double t : {0.1, 0.23, 0.37, 0.5}) scale = std::max(scale, std::abs(y(t)[0]));
  const Jet at0 = y(0.0);
  const double tol = 1e-12 * std::max(scale, 1.0);
  if (std::abs(at0[0]) > tol || std::abs(at0[1]) > tol || std::abs(at0[2]) > tol)
    throw std::invalid_argument("y, y', y'' must vanish at 0");
  for (double t : {0.1, 0.23, 0.37})
    if (std::abs(y(t)[0] - y(1 - t)[0]) > tol) throw std::invalid_argument("y must be even about 1/2");
  GIdentity r{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i), w = g->weight(i);
    const Jet j = y(x);
    const double a = 1 / x, a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
    r.lhs += w * g_value(j, x) * j[0];
    r.rhs += w * ((-6 + 12 * a) * sq(j[2]) + (48 * a3 + 180 * a2 - 144 * a) * sq(j[1]) +
                  (-144 * a5 - 216 * a4 + 144 * a3) * sq(j[0]));
  }
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

double g_identity_residual(const JetFn& y, const GridPtr& g) { return g_identity(y, g).residual; }

HardyValues hardy_check(const JetFn& y, const GridPtr& g) {
  HardyValues h{0, 0, 0, 0};
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i), w = g->weight(i);
    const Jet j = y(x);
    const double x2 = x * x, x3 = x2 * x;
    h.lhs5 += w * sq(j[0]) / (x3 * x2);
    h.rhs5 += w * 0.25 * sq(j[1]) / x3;
    h.lhs4 += w * sq(j[0]) / (x2 * x2);
    h.rhs4 += w * (4.0 / 9.0) * sq(j[1]) / x2;
  }
  return h;
}

// ---- Bessel basis lemma ---------------------------------------------------

double y0_at_half() {
  // Ferrers functions of order 3 and degree nu at 0.
  const double nu = 0.5 * (std::sqrt(33.0) - 1), mu = 3.0;
  const double P = std::pow(2.0, mu) * std::sqrt(kPi) /
                   (std::tgamma(0.5 * (nu - mu) + 1) * std::tgamma(0.5 * (1 - nu - mu)));
  const double Q = -std::pow(2.0, mu - 1) * std::sqrt(kPi) * std::sin(0.5 * (nu + mu) * kPi) *
                   std::tgamma(0.5 * (nu + mu + 1)) / std::tgamma(0.5 * (nu - mu) + 1);
  const double w = P + 2 / kPi / std::tan(0.5 * kPi * nu) * Q;
  return -w / 0.5;
}

namespace {

using AState = std::array<double, 7>;

// (y, y', M_0..M_4) with M_k = int_{1/2}^x (t - a)^k z0(t) dt. Anchoring the
// moments at the nearer end a keeps the binomial sum for f0 free of cancellation.
void appendix_rhs(double a, const AState& s, AState& d, double x) {
  const double w = x * (1 - x), dw = 1 - 2 * x;
  const double p = 2 * dw / w, dp = (-4 * w - 2 * dw * dw) / (w * w);
  const double q = -2 / (w * w) + 6 / w, dq = (4 / (w * w * w) - 6 / (w * w)) * dw;
  const double y = s[0], y1 = s[1];
  const double y2 = -p * y1 - q * y;
  const double y3 = -(dp * y1 + p * y2 + dq * y + q * y1);
  const double z = y3 + 12 / x * y2 + 24 / (x * x) * y1 - 24 / (x * x * x) * y;
  d[0] = y1;
  d[1] = y2;
  double t = 1.0;
  for (int k = 0; k < 5; ++k) {
    d[2 + k] = t * z;
    t *= x - a;
  }
}

double f0_from_moments(double a, const AState& s, double x) {
  static constexpr double binom[5] = {1, 4, 6, 4, 1};
  double f = 0.0;
  for (int k = 0; k < 5; ++k) f += binom[k] * std::pow(x - a, 4 - k) * (k % 2 == 0 ? 1 : -1) * s[2 + k];
  return -f / 24;
}

}  // namespace

AppendixReport appendix_a_pipeline(const GridPtr& g) {
  if (!g->symmetric()) throw std::invalid_argument("appendix pipeline needs a symmetric grid");
  const std::size_t n = g->size();
  const double yh = y0_at_half();
  std::vector<double> left(g->nodes().rbegin() + n / 2, g->nodes().rend());
  std::vector<double> right(g->nodes().begin() + n / 2, g->nodes().end());
  std::vector<AState> sl, sr;
  try {
    auto lhs = [](const AState& s, AState& d, double x) { appendix_rhs(0.0, s, d, x); };
    auto rhs = [](const AState& s, AState& d, double x) { appendix_rhs(1.0, s, d, x); };
    sl = solve_at<7>(lhs, {yh, 0, 0, 0, 0, 0, 0}, 0.5, left);
    sr = solve_at<7>(rhs, {yh, 0, 0, 0, 0, 0, 0}, 0.5, right);
  } catch (const SolverError& e) {
    throw SolverError(std::string("y0/f0 stage: ") + e.what());
  }
  AppendixReport r{};
  r.y0_half = yh;
  GridFn y0(g);
  r.f0 = GridFn(g);
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t il = n / 2 - 1 - i, ir = n / 2 + i;
    y0[il] = sl[i][0];
    y0[ir] = sr[i][0];
    r.f0[il] = f0_from_moments(0.0, sl[i], g->node(il));
    r.f0[ir] = f0_from_moments(1.0, sr[i], g->node(ir));
  }
  // Within 1e-3 of x = 1 the stored nodes carry the rounding of 1 - x, which
  // y0 ~ (1-x)^-2 amplifies; the parity defect is measured inside that band.
  {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (g->node(i) < 1e-3 || g->node(i) > 1 - 1e-3) continue;
      num += g->weight(i) * sq(y0[i] - y0[n - 1 - i]);
      den += g->weight(i) * sq(y0[i]);
    }
    r.y0_parity_defect = std::sqrt(num / den);
  }
  r.f0_parity_defect = l2_norm(r.f0 - reflect(r.f0)) / l2_norm(r.f0);

  for (std::size_t i = 0; i < n; ++i) {
    const double x = g->node(i), w = g->weight(i) * r.f0[i];
    r.integral_cos += w * std::cos(2 * kPi * x);
    if (i < n / 2) {
      r.integral_t += w * x;
      r.integral_t3 += w * x * x * x;
    }
  }
  r.bc_over_K = -960 * r.integral_t + 15360 * r.integral_t3;
  r.c_over_K = 26880 * r.integral_t - 1075200 * r.integral_t3;
  r.b_over_K = r.bc_over_K - r.c_over_K / 7;
  r.b_over_K_rederived = r.bc_over_K - 2 * r.c_over_K / 7;

  // unknowns (b, c, K)
  Eigen::Matrix3d S;
  S << 1, 1.0 / 7, -r.bc_over_K, 0, 1, -r.c_over_K, 1, (kPi * kPi - 6) / (2 * kPi * kPi),
      2 * kPi * kPi * r.integral_cos;
  for (int j = 0; j < 3; ++j) S.col(j).normalize();
  const auto sv = Eigen::JacobiSVD<Eigen::Matrix3d>(S).singularValues();
  r.system_smin = sv(2) / sv(0);
  r.K_forced_zero = r.system_smin > 1e-8;
  return r;
}

std::string to_json(const AppendixReport& r) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "{\n  \"integral_cos\": %.12g,\n  \"integral_t\": %.12g,\n  \"integral_t3\": %.12g,\n"
                "  \"b_over_K\": %.10g,\n  \"c_over_K\": %.10g,\n  \"b_over_K_rederived\": %.10g,\n"
                "  \"K_forced_zero\": %s,\n  \"system_smin\": %.6g,\n  \"y0_half\": %.15g,\n"
                "  \"y0_parity_defect\": %.3e,\n  \"f0_parity_defect\": %.3e,\n"
                "  \"tolerances\": {\"integrals_rel\": 1e-3, \"integral_t3_abs\": 2e-6, \"ratios_rel\": 1e-3}\n}\n",
                r.integral_cos, r.integral_t, r.integral_t3, r.b_over_K, r.c_over_K, r.b_over_K_rederived,
                r.K_forced_zero ? "true" : "false", r.system_smin, r.y0_half, r.y0_parity_defect,
                r.f0_parity_defect);
  return buf;
}

FrameProbe basis_frame_probe(int N, const GridPtr& g) {
  if (N < 1 || N > 60) throw std::invalid_argument("N must lie in [1, 60]");
  const std::size_t n = g->size();
  Eigen::MatrixXd B(n, 2 * N + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g->node(i), sw = std::sqrt(g->weight(i));
    B(i, 0) = sw;
    for (int k = 1; k <= N; ++k) {
      B(i, 2 * k - 1) = sw * phi_psi(0, k * kPi * x).phi;
      B(i, 2 * k) = sw * phi_psi(2, (k + 1) * kPi * x).phi;
    }
  }
  for (int j = 0; j < B.cols(); ++j) B.col(j).normalize();
  const Eigen::MatrixXd G = B.transpose() * B;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues();
  return {ev(0), ev(ev.size() - 1) / ev(0)};
}

}  // namespace ispec
