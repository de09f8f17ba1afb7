// Half-integer Bessel functions, their zeros, and the polynomial families
// attached to them.
#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace ispec {

using cplx = std::complex<double>;

struct Order {
  int ell = 0;
  double nu() const { return ell + 0.5; }
};

// Exact rational with 64-bit parts, always reduced, den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

Rational operator+(Rational a, Rational b);
Rational operator-(Rational a, Rational b);
Rational operator*(Rational a, Rational b);
Rational operator-(Rational a);

enum class PolyKind { P, Q, A_tilde, A_obstruction };

// Coefficients lowest degree first. Real and imaginary parts are kept as
// separate exact vectors; for P, Q and A the imaginary part is empty.
struct PolySeq {
  PolyKind kind = PolyKind::P;
  int degree = 0;
  std::vector<Rational> re;
  std::vector<Rational> im;

  std::vector<cplx> coeffs() const;
  double eval(double t) const;
  cplx eval(cplx t) const;
};

// Largest ell for which the exact recursions are guaranteed not to overflow.
inline constexpr int kMaxPolyEll = 12;

// (P_ell, Q_{ell-1}).
std::pair<PolySeq, PolySeq> pq_polynomials(int ell);
PolySeq p_polynomial(int ell);
PolySeq q_polynomial(int ell);  // Q_ell; ell = -1 gives 0

PolySeq a_tilde_polynomial(int ell);
PolySeq a_polynomial(int ell);

enum class Branch { plus_nu, minus_nu };

// Below this modulus (or below ell) the power series replaces the closed forms.
inline constexpr double kSeriesSwitch = 1e-2;

double bessel_half(Order o, Branch b, double z);
cplx bessel_half(Order o, Branch b, cplx z);

double bessel_y_half(Order o, double z);
cplx bessel_y_half(Order o, cplx z);

double bessel_half_deriv(Order o, double z);    // J'_nu
double bessel_y_half_deriv(Order o, double z);  // Y'_nu

cplx hankel1_half(Order o, cplx z);
cplx hankel2_half(Order o, cplx z);
cplx hankel1_half_deriv(Order o, cplx z);
cplx hankel2_half_deriv(Order o, cplx z);

double bessel_zero(Order o, int n);
std::vector<double> bessel_zeros(Order o, int n_max);

struct PhiPsi {
  double phi;
  double psi;
};

PhiPsi phi_psi(int ell, double x);

}  // namespace ispec
