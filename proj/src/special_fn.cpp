#include "ispec/special_fn.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ispec {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) { n = -n; d = -d; }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) { __int128 t = a % b; a = b; b = t; }
  if (a > 1) { n /= a; d /= a; }
  Rational r;
  r.num = narrow(n);
  r.den = narrow(d);
  return r;
}

using RVec = std::vector<Rational>;

// c * t * p  (shift by one degree)
RVec times_t(const RVec& p, Rational c) {
  RVec out(p.size() + 1);
  for (std::size_t k = 0; k < p.size(); ++k) out[k + 1] = c * p[k];
  return out;
}

RVec times_t2(const RVec& p, Rational c) {
  RVec out(p.size() + 2);
  for (std::size_t k = 0; k < p.size(); ++k) out[k + 2] = c * p[k];
  return out;
}

RVec add(const RVec& a, const RVec& b) {
  RVec out(std::max(a.size(), b.size()));
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = out[k] + a[k];
  for (std::size_t k = 0; k < b.size(); ++k) out[k] = out[k] + b[k];
  return out;
}

RVec scale(const RVec& a, Rational c) {
  RVec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = c * a[k];
  return out;
}

void trim(RVec& v) {
  while (v.size() > 1 && v.back().num == 0) v.pop_back();
}

void check_ell(int ell) {
  if (ell < 0 || ell > kMaxPolyEll)
    throw std::out_of_range("polynomial index out of range: " + std::to_string(ell));
}

// Recursion y_{k+1} = (2k + offset) t y_k - y_{k-1}.
RVec three_term(int steps, RVec ym1, RVec y0, int offset) {
  for (int k = 0; k < steps; ++k) {
    RVec next = add(times_t(y0, Rational(2 * k + offset)), scale(ym1, Rational(-1)));
    ym1 = std::move(y0);
    y0 = std::move(next);
  }
  trim(y0);
  return y0;
}

PolySeq real_poly(PolyKind kind, RVec c) {
  PolySeq p;
  p.kind = kind;
  trim(c);
  p.degree = static_cast<int>(c.size()) - 1;
  if (c.size() == 1 && c[0].num == 0) p.degree = -1;
  p.re = std::move(c);
  return p;
}

// ---- Bessel evaluation -------------------------------------------------

template <class T>
T series_j(double nu, T z) {
  const T h = z / 2.0;
  const T h2 = -h * h;
  T term = std::pow(h, nu) / std::tgamma(nu + 1.0);
  T sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= h2 / (k * (k + nu));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > 2) break;
  }
  return sum;
}

struct PQTable {
  std::vector<std::vector<double>> p, q;  // P_l and Q_{l-1}, lowest degree first
  PQTable() {
    for (int l = 0; l <= kMaxPolyEll; ++l) {
      p.push_back(std::vector<double>());
      q.push_back(std::vector<double>());
      for (const auto& c : p_polynomial(l).re) p.back().push_back(c.value());
      for (const auto& c : q_polynomial(l - 1).re) q.back().push_back(c.value());
    }
  }
};

const PQTable& pq_table() {
  static const PQTable table;
  return table;
}

template <class T>
T horner(const std::vector<double>& c, T t) {
  T acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

template <class T>
T closed_form(int ell, Branch b, T z) {
  check_ell(ell);
  const auto& tab = pq_table();
  const T t = T(1.0) / z;
  const T pv = horner(tab.p[ell], t);
  const T qv = horner(tab.q[ell], t);
  const T pref = std::sqrt(T(2.0 / kPi) / z);
  if (b == Branch::plus_nu) return pref * (pv * std::sin(z) - qv * std::cos(z));
  const double sgn = (ell % 2 == 0) ? 1.0 : -1.0;
  return sgn * pref * (pv * std::cos(z) + qv * std::sin(z));
}

template <class T>
T bessel_impl(Order o, Branch b, T z) {
  const double az = std::abs(z);
  if (az == 0.0) {
    if (b == Branch::minus_nu) throw std::domain_error("J_{-nu} has a pole at z = 0");
    return T(0.0);
  }
  const double nu = o.nu();
  if (b == Branch::plus_nu) {
    if (az < std::max(kSeriesSwitch, static_cast<double>(o.ell))) return series_j(nu, z);
    return closed_form(o.ell, b, z);
  }
  if (az < kSeriesSwitch) return series_j(-nu, z);
  return closed_form(o.ell, b, z);
}

template <class T>
T y_impl(Order o, T z) {
  const double s = (o.ell % 2 == 0) ? -1.0 : 1.0;  // (-1)^{ell+1}
  return s * bessel_impl(o, Branch::minus_nu, z);
}

// J_{nu-1}, with J_{-1/2} for ell = 0.
template <class T>
T j_lower(Order o, T z) {
  if (o.ell == 0) return bessel_impl(Order{0}, Branch::minus_nu, z);
  return bessel_impl(Order{o.ell - 1}, Branch::plus_nu, z);
}

// Y_{nu-1}, with Y_{-1/2} = J_{1/2} for ell = 0.
template <class T>
T y_lower(Order o, T z) {
  if (o.ell == 0) return bessel_impl(Order{0}, Branch::plus_nu, z);
  return y_impl(Order{o.ell - 1}, z);
}

template <class T>
T j_deriv(Order o, T z) {
  return j_lower(o, z) - (o.nu() / z) * bessel_impl(o, Branch::plus_nu, z);
}

template <class T>
T y_deriv(Order o, T z) {
  return y_lower(o, z) - (o.nu() / z) * y_impl(o, z);
}

// Zero of J_nu in the open interval (a, b), known to contain exactly one.
double refine_zero(Order o, double a, double b, double guess) {
  auto f = [&](double x) { return bessel_impl(o, Branch::plus_nu, x); };
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > 1e-4 * std::max(1.0, a); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) { a = m; fa = fm; } else { b = m; }
  }
  double x = (guess > a && guess < b) ? guess : 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (fa < 0)) a = x; else b = x;
    double xn = x - fx / j_deriv(o, x);
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
    const bool done = std::abs(xn - x) <= 4e-16 * xn || b - a <= 4e-16 * b;
    x = xn;
    if (done) break;
  }
  // Roundoff floor of J near x is about eps * x * |J'(x)|.
  const double floor = 1e-13 + 8 * 2.2e-16 * x * std::abs(j_deriv(o, x));
  if (std::abs(f(x)) > floor) throw std::runtime_error("bessel_zero: no convergence");
  return x;
}

}  // namespace

// ---- Rational ----------------------------------------------------------

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make(n, d); }

Rational operator+(Rational a, Rational b) {
  return make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
              static_cast<__int128>(a.den) * b.den);
}
Rational operator-(Rational a) { return make(-static_cast<__int128>(a.num), a.den); }
Rational operator-(Rational a, Rational b) { return a + (-b); }
Rational operator*(Rational a, Rational b) {
  return make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}

// ---- PolySeq -----------------------------------------------------------

std::vector<cplx> PolySeq::coeffs() const {
  std::vector<cplx> c(std::max(re.size(), im.size()));
  for (std::size_t k = 0; k < re.size(); ++k) c[k] += re[k].value();
  for (std::size_t k = 0; k < im.size(); ++k) c[k] += cplx(0.0, im[k].value());
  return c;
}

double PolySeq::eval(double t) const {
  double acc = 0.0;
  for (std::size_t k = re.size(); k-- > 0;) acc = acc * t + re[k].value();
  return acc;
}

cplx PolySeq::eval(cplx t) const {
  const auto c = coeffs();
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

PolySeq p_polynomial(int ell) {
  check_ell(ell);
  if (ell == 0) return real_poly(PolyKind::P, {Rational(1)});
  // P_{l+1} = (2l+1) t P_l - P_{l-1}, starting from P_0 = 1, P_1 = t.
  RVec pm1{Rational(1)}, p0{Rational(0), Rational(1)};
  for (int l = 1; l < ell; ++l) {
    RVec next = add(times_t(p0, Rational(2 * l + 1)), scale(pm1, Rational(-1)));
    pm1 = std::move(p0);
    p0 = std::move(next);
  }
  return real_poly(PolyKind::P, p0);
}

PolySeq q_polynomial(int ell) {
  if (ell == -1) return real_poly(PolyKind::Q, {Rational(0)});
  check_ell(ell);
  return real_poly(PolyKind::Q, three_term(ell, {Rational(0)}, {Rational(1)}, 3));
}

std::pair<PolySeq, PolySeq> pq_polynomials(int ell) {
  return {p_polynomial(ell), q_polynomial(ell - 1)};
}

PolySeq a_tilde_polynomial(int ell) {
  check_ell(ell);
  // A~_{l+1} = (2l+1) A~_l - z^2 A~_{l-1}; A~_0 = 1, A~_1 = 1 - i z.
  RVec re_m1{Rational(1)}, im_m1{Rational(0)};
  RVec re0{Rational(1)}, im0{Rational(0), Rational(-1)};
  if (ell == 0) { re0 = re_m1; im0 = im_m1; }
  for (int l = 1; l < ell; ++l) {
    RVec nre = add(scale(re0, Rational(2 * l + 1)), times_t2(re_m1, Rational(-1)));
    RVec nim = add(scale(im0, Rational(2 * l + 1)), times_t2(im_m1, Rational(-1)));
    re_m1 = std::move(re0); im_m1 = std::move(im0);
    re0 = std::move(nre); im0 = std::move(nim);
  }
  trim(re0);
  trim(im0);
  PolySeq p;
  p.kind = PolyKind::A_tilde;
  p.degree = static_cast<int>(std::max(re0.size(), im0.size())) - 1;
  p.re = std::move(re0);
  p.im = std::move(im0);
  return p;
}

PolySeq a_polynomial(int ell) {
  // A_l(t) = A~_l(t / 2i) = A~_l(-i t / 2).
  const PolySeq at = a_tilde_polynomial(ell);
  const std::size_t n = std::max(at.re.size(), at.im.size());
  RVec re(n), im(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Rational a = k < at.re.size() ? at.re[k] : Rational(0);
    const Rational b = k < at.im.size() ? at.im[k] : Rational(0);
    const Rational half_k(1, std::int64_t{1} << k);
    // (a + i b) * (-i)^k
    Rational cr, ci;
    switch (k % 4) {
      case 0: cr = a; ci = b; break;
      case 1: cr = b; ci = -a; break;
      case 2: cr = -a; ci = -b; break;
      default: cr = -b; ci = a; break;
    }
    re[k] = cr * half_k;
    im[k] = ci * half_k;
  }
  for (const auto& c : im)
    if (c.num != 0) throw std::logic_error("A_l has a non-real coefficient");
  return real_poly(PolyKind::A_obstruction, re);
}

// ---- Bessel ------------------------------------------------------------

double bessel_half(Order o, Branch b, double z) {
  if (z < 0.0) throw std::domain_error("real bessel_half requires z >= 0");
  return bessel_impl(o, b, z);
}
cplx bessel_half(Order o, Branch b, cplx z) { return bessel_impl(o, b, z); }

double bessel_y_half(Order o, double z) { return y_impl(o, z); }
cplx bessel_y_half(Order o, cplx z) { return y_impl(o, z); }

double bessel_half_deriv(Order o, double z) { return j_deriv(o, z); }
double bessel_y_half_deriv(Order o, double z) { return y_deriv(o, z); }

cplx hankel1_half(Order o, cplx z) {
  return bessel_impl(o, Branch::plus_nu, z) + cplx(0, 1) * y_impl(o, z);
}
cplx hankel2_half(Order o, cplx z) {
  return bessel_impl(o, Branch::plus_nu, z) - cplx(0, 1) * y_impl(o, z);
}
cplx hankel1_half_deriv(Order o, cplx z) { return j_deriv(o, z) + cplx(0, 1) * y_deriv(o, z); }
cplx hankel2_half_deriv(Order o, cplx z) { return j_deriv(o, z) - cplx(0, 1) * y_deriv(o, z); }

double bessel_zero(Order o, int n) {
  if (n < 1) throw std::invalid_argument("bessel_zero: n must be >= 1");
  // Zeros of order k at indices n .. n + (ell - k), built up from nu = 1/2.
  std::vector<double> level(o.ell + 1);
  for (int i = 0; i <= o.ell; ++i) level[i] = (n + i) * kPi;
  for (int k = 1; k <= o.ell; ++k) {
    std::vector<double> next(o.ell - k + 1);
    for (int i = 0; i <= o.ell - k; ++i)
      next[i] = refine_zero(Order{k}, level[i], level[i + 1], (n + i + 0.5 * k) * kPi);
    level = std::move(next);
  }
  return level[0];
}

std::vector<double> bessel_zeros(Order o, int n_max) {
  std::vector<double> level(n_max + o.ell);
  for (int i = 0; i < n_max + o.ell; ++i) level[i] = (i + 1) * kPi;
  for (int k = 1; k <= o.ell; ++k) {
    std::vector<double> next(level.size() - 1);
    for (std::size_t i = 0; i + 1 < level.size(); ++i)
      next[i] = refine_zero(Order{k}, level[i], level[i + 1], (i + 1 + 0.5 * k) * kPi);
    level = std::move(next);
  }
  level.resize(n_max);
  return level;
}

PhiPsi phi_psi(int ell, double x) {
  if (x < 0.0) throw std::domain_error("phi_psi requires x >= 0");
  if (x == 0.0) return {0.0, 0.0};
  const Order o{ell};
  const double j = bessel_impl(o, Branch::plus_nu, x);
  const double y = y_impl(o, x);
  const double c = 0.5 * kPi * x;
  return {c * j * j, -c * j * y};
}

}  // namespace ispec
