#include "ispec/ksgreen.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/trigamma.hpp>
#include <gsl/gsl_sf_clausen.h>

#include "ispec/xform.hpp"

namespace ispec {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Terms between N and kBand * N are summed exactly before the comparison series.
constexpr int kBand = 16;
constexpr double kZeroGuard = 1e-3;

const std::vector<double>& zeros(Order o, int n) {
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& z = cache[o.ell];
  if (static_cast<int>(z.size()) < n) z = bessel_zeros(o, std::max(n, 2 * static_cast<int>(z.size())));
  return z;
}

void guard_zero(Order o, cplx z) {
  const double r = std::abs(z.real()) + 2.0;
  int n = 8;
  while (zeros(o, n).back() < r) n *= 2;
  for (double j : zeros(o, n)) {
    if (j > r) break;
    if (std::abs(z - j) < kZeroGuard || std::abs(z + j) < kZeroGuard)
      throw std::domain_error("z too close to a Bessel zero");
  }
}

// sum_{n>M} e^{i n a} / n^2 via Li_2(e^{ia}) minus the partial sum.
cplx dilog_tail(double a, int M) {
  a = std::fmod(a, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  const cplx li2(kPi * kPi / 6 - a * (2 * kPi - a) / 4, a == 0.0 ? 0.0 : gsl_sf_clausen(a));
  cplx s = 0.0;
  for (int n = M; n >= 1; --n) s += std::polar(1.0 / (double(n) * n), n * a);
  return li2 - s;
}

double ks_term_num(Order o, double x, double X, double j) {
  const double d = bessel_half_deriv(o, j);
  return bessel_half(o, Branch::plus_nu, x * j) * bessel_half(o, Branch::plus_nu, X * j) / (d * d);
}

// Barycentric panel interpolant values of f at points t (all inside panel p).
double interp(const GridFn& f, int p, double t) {
  const Grid& g = *f.grid;
  const int m = g.nodes_per_panel();
  const double a = g.edges()[p], b = g.edges()[p + 1];
  const double s = (2 * t - a - b) / (b - a);
  const auto& rx = g.ref_nodes();
  const auto& bw = g.bary_weights();
  const double* v = f.values.data() + static_cast<std::size_t>(p) * m;
  double num = 0, den = 0;
  for (int i = 0; i < m; ++i) {
    const double dd = s - rx[i];
    if (dd == 0.0) return v[i];
    const double w = bw[i] / dd;
    num += w * v[i];
    den += w;
  }
  return num / den;
}

}  // namespace

cplx ks_rhs(Order o, double x, double X, cplx z) {
  if (x == 0.0) return 0.0;
  const cplx jz = bessel_half(o, Branch::plus_nu, z);
  const cplx yz = bessel_y_half(o, z);
  const cplx bracket = jz * bessel_y_half(o, X * z) - yz * bessel_half(o, Branch::plus_nu, X * z);
  return kPi / (4.0 * jz) * bessel_half(o, Branch::plus_nu, x * z) * bracket;
}

cplx ks_half_closed_form(double x, double X, cplx z) {
  if (x == 0.0) return 0.0;
  return -std::sin(x * z) * std::sin((1 - X) * z) / (2.0 * z * std::sin(z) * std::sqrt(x * X));
}

KSValue ks_evaluate(const KSQuery& q) {
  if (!(0.0 <= q.x && q.x <= q.X && q.X <= 1.0)) throw std::domain_error("need 0 <= x <= X <= 1");
  if (q.n_terms < 1) throw std::invalid_argument("n_terms must be positive");
  const Order o = q.order;
  guard_zero(o, q.z);
  KSValue v{0.0, ks_rhs(o, q.x, q.X, q.z), 0.0};
  if (q.x > 0.0) {
    const cplx z2 = q.z * q.z;
    const int M = q.tail == TailMode::none ? q.n_terms : kBand * q.n_terms;
    const auto& js = zeros(o, M);
    cplx s = 0.0;
    for (int n = M; n >= 1; --n) {
      const double j = js[n - 1];
      s += ks_term_num(o, q.x, q.X, j) / (z2 - j * j);
    }
    if (q.tail == TailMode::integral_compensation) {
      // cos(j(X-x)) + cos(j(x+X) - 2 theta) over 2 sqrt(xX) (z^2 - j^2), with
      // j ~ (n + delta) pi and z^2 - j^2 ~ -(n pi)^2.
      const double delta = 0.5 * o.nu() - 0.25, theta = 0.5 * o.nu() * kPi + 0.25 * kPi;
      const double u1 = q.X - q.x, u2 = q.x + q.X;
      const cplx t1 = std::polar(1.0, delta * kPi * u1) * dilog_tail(kPi * u1, M);
      const cplx t2 = std::polar(1.0, delta * kPi * u2 - 2 * theta) * dilog_tail(kPi * u2, M);
      s += -(t1.real() + t2.real()) / (2 * std::sqrt(q.x * q.X) * kPi * kPi);
    }
    v.lhs = s;
  }
  v.residual = std::abs(v.lhs - v.rhs);
  return v;
}

double ks_residual(const KSQuery& q) { return ks_evaluate(q).residual; }

std::string ks_csv(const std::vector<KSQuery>& qs) {
  std::ostringstream os;
  os << "ell,x,X,z_re,z_im,n_terms,tail,lhs_re,lhs_im,rhs_re,rhs_im,residual\n";
  char buf[512];
  for (const auto& q : qs) {
    const auto v = ks_evaluate(q);
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%d,%s,%.17g,%.17g,%.17g,%.17g,%.6e\n", q.order.ell,
                  q.x, q.X, q.z.real(), q.z.imag(), q.n_terms,
                  q.tail == TailMode::none ? "none" : "integral_compensation", v.lhs.real(), v.lhs.imag(),
                  v.rhs.real(), v.rhs.imag(), v.residual);
    os << buf;
  }
  return os.str();
}

// ---- Green identity --------------------------------------------------------

double bessel_moment(Order o, const GridFn& zeta, double j) {
  const Grid& g = *zeta.grid;
  const auto& rx = g.ref_nodes();
  const auto& rw = g.ref_weights();
  double s = 0.0;
  for (int p = 0; p < g.panel_count(); ++p) {
    const double a = g.edges()[p], b = g.edges()[p + 1];
    const int sub = std::max(1, static_cast<int>(std::ceil(j * (b - a) / kPi)));
    const double h = (b - a) / sub;
    for (int k = 0; k < sub; ++k) {
      const double c = a + (k + 0.5) * h;
      for (std::size_t i = 0; i < rx.size(); ++i) {
        const double t = c + 0.5 * h * rx[i];
        // x J(jx)^2 = (2 / (pi j)) Phi(jx)
        s += 0.5 * h * rw[i] * interp(zeta, p, t) * phi_psi(o.ell, j * t).phi;
      }
    }
  }
  return 2.0 / (kPi * j) * s;
}

cplx green_functional(Order o, const GridFn& zeta, cplx z) {
  const cplx jz = bessel_half(o, Branch::plus_nu, z), yz = bessel_y_half(o, z);
  cplx s = 0.0;
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    const double x = zeta.x(i);
    const cplx a = bessel_half(o, Branch::plus_nu, x * z);
    s += zeta.grid->weight(i) * x * zeta[i] * a * (jz * bessel_y_half(o, x * z) - yz * a);
  }
  return s;
}

GreenValue green_evaluate(Order o, const GridFn& zeta, cplx z, int n_terms, TailMode tail) {
  if (n_terms < 1) throw std::invalid_argument("n_terms must be positive");
  guard_zero(o, z);
  const cplx z2 = z * z;
  const auto& js = zeros(o, kBand * n_terms);
  cplx s = 0.0;
  for (int n = n_terms; n >= 1; --n) {
    const double j = js[n - 1], d = bessel_half_deriv(o, j);
    s += bessel_moment(o, zeta, j) / ((z2 - j * j) * d * d);
  }
  if (tail == TailMode::integral_compensation) {
    // Large-n moments tend to (1 / (pi j)) int zeta and J'(j)^2 to 2 / (pi j).
    const double m0 = 0.5 * integrate(zeta);
    const int M = kBand * n_terms;
    cplx t = 0.0;
    for (int n = M; n > n_terms; --n) {
      const double j = js[n - 1], d = bessel_half_deriv(o, j);
      t += 2.0 / (kPi * j * d * d) / (z2 - j * j);
    }
    const double delta = 0.5 * o.nu() - 0.25;
    t -= boost::math::trigamma(M + 1 + delta) / (kPi * kPi);
    s += m0 * t;
  }
  const cplx rhs = kPi / (4.0 * bessel_half(o, Branch::plus_nu, z)) * green_functional(o, zeta, z);
  return {s, rhs, std::abs(s - rhs)};
}

double green_residual(Order o, const GridFn& zeta, cplx z, int n_terms, TailMode tail) {
  return green_evaluate(o, zeta, z, n_terms, tail).residual;
}

MomentValue moment_functional(Order o, const GridFn& zeta, double z_small) {
  const double p = 2 * o.nu();
  const double m = inner(zeta, sample(zeta.grid, [p](double x) { return x * (1 - std::pow(x, p)); }));
  const cplx rhs = kPi / (4.0 * bessel_half(o, Branch::plus_nu, cplx(z_small))) * green_functional(o, zeta, z_small);
  return {m, -4 * o.nu() * rhs.real()};
}

// ---- reduced identity ------------------------------------------------------

cplx reduced_identity_direct(int ell, const GridFn& zeta, cplx z) {
  const auto t = apply({OpFamily::T, ell}, zeta);
  const cplx p = p_polynomial(ell).eval(1.0 / z);
  const cplx q = ell == 0 ? cplx(0.0) : q_polynomial(ell - 1).eval(1.0 / z);
  cplx s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const cplx w = z * (2 * t.x(i) - 1);
    s += t.grid->weight(i) * t[i] * (p * std::cos(w) - q * std::sin(w));
  }
  return s;
}

cplx reduced_identity_bessel(int ell, const GridFn& zeta, cplx z) {
  const auto t = apply({OpFamily::T, ell}, zeta);
  cplx sn = 0.0, cs = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = t.grid->weight(i) * t[i];
    sn += w * std::sin(2.0 * z * t.x(i));
    cs += w * std::cos(2.0 * z * t.x(i));
  }
  const Order o{ell};
  const cplx e = bessel_half(o, Branch::plus_nu, z) * sn +
                 (ell % 2 == 0 ? 1.0 : -1.0) * bessel_half(o, Branch::minus_nu, z) * cs;
  return e / std::sqrt(2.0 / (kPi * z));
}

double reduced_identity_residual(int ell, const GridFn& zeta, cplx z) {
  return std::abs(reduced_identity_direct(ell, zeta, z) - reduced_identity_bessel(ell, zeta, z));
}

}  // namespace ispec
