// The (0,1) and (0,2) uniqueness analyses: the singular ODEs, the explicit
// zeta and its obstruction value, the Hardy and integration-by-parts checks,
// and the Bessel-basis lemma pipeline.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/differentiation/autodiff.hpp>

#include "ispec/funcspace.hpp"

namespace ispec {

// Value and first five derivatives at a point.
using Jet = std::array<double, 6>;
using JetFn = std::function<Jet(double)>;

// Wraps a generic callable (templated on the scalar type) as a JetFn.
template <class F>
JetFn jet_fn(F f) {
  return [f](double x) {
    const auto v = f(boost::math::differentiation::make_fvar<double, 5>(x));
    Jet j;
    for (int k = 0; k < 6; ++k) j[k] = v.derivative(k);
    return j;
  };
}

// ---- l = 1 ---------------------------------------------------------------

struct ShootResult {
  GridFn solution;        // on a symmetric grid over [x0, 1 - x0]
  double boundary_defect;  // |y - y(1-.)| / |y|
  double slope_at_half;    // y'(1/2) / y(1/2)
};

// Shoots y'' + (2/x - 2/(1-x)) y' - (2/x^2 + 2/(1-x)^2 + 4/x + 4/(1-x)) y = 0
// from x0 along the branch y ~ x.
ShootResult ode01_shoot(double x0 = 1e-4);
double ode01_residual(const JetFn& y, double x);

// f = -y'' + (2 - 4/x) y' + (4/x^2 + 8/x) y.
double deff_value(const Jet& y, double x);
// Q(y) = int y'^2 + int (2/x^2 + 8/x) y^2.
double quadratic_form(const JetFn& y, const GridPtr& g);
double quadratic_form(const GridFn& y);
// int f y with f from deff_value.
double deff_pairing(const JetFn& y, const GridPtr& g);

// ---- l = 2 ---------------------------------------------------------------

// Coefficients c0..c4 of the fourth-order equation sum c_k(x) y^(k) = 0.
std::array<double, 5> ode02_coefficients(double x);
double ode02_residual(const Jet& y, double x);

struct EvenSpace {
  int dimension = 0;
  bool ambiguous = false;                // a singular value sits near the cutoff
  std::vector<double> singular_values;   // of the parity-matching matrix
  std::vector<GridFn> basis;             // on a symmetric grid over [x0, 1 - x0]
};

// Shoots the branches rho = 1, 3, 4 from x0 and keeps the combinations with
// y'(1/2) = y'''(1/2) = 0.
EvenSpace ode02_even_space(double x0 = 1e-4, double rank_tol = 1e-6);

struct ExplicitZeta {
  double amplitude;
  GridFn values;
  GridFn derivative;
};

// zeta = A (4x^3 - 6x^2 - 2x + 2 - 3(2x-1)/(2u^2) + 2(2x-1)/u), u = x^2 - x + 1.
template <class T>
T zeta_formula(double A, const T& x) {
  const T u = x * x - x + 1.0;
  const T s = 2.0 * x - 1.0;
  return A * (4.0 * x * x * x - 6.0 * x * x - 2.0 * x + 2.0 - 3.0 * s / (2.0 * u * u) + 2.0 * s / u);
}
Jet zeta_jet(double A, double x);
ExplicitZeta zeta_explicit(double A, const GridPtr& g);

// 4 A_2(D)[T_2 zeta] at x from the expanded formula with its two integral terms.
double obstruction_direct(double A, double x, const GridPtr& g);
// Same quantity from differentiating t2_explicit on the grid.
double obstruction_from_t2(double A, double x, const GridPtr& g);

struct ObstructionValue {
  double direct;
  double from_t2;
};
ObstructionValue obstruction_value(double A = 1.0);

// G(x) assembled from the coefficient display, applied to y.
double g_value(const Jet& y, double x);
struct GIdentity {
  double lhs;  // int G y
  double rhs;  // weighted quadratic expression
  double residual;
};
// y must be even with y(0) = y'(0) = y''(0) = 0; throws std::invalid_argument otherwise.
GIdentity g_identity(const JetFn& y, const GridPtr& g);
double g_identity_residual(const JetFn& y, const GridPtr& g);

struct HardyValues {
  double lhs5, rhs5;  // int y^2/x^5  vs  (1/4) int y'^2/x^3
  double lhs4, rhs4;  // int y^2/x^4  vs  (4/9) int y'^2/x^2
  bool holds() const { return lhs5 < rhs5 && lhs4 < rhs4; }
};
HardyValues hardy_check(const JetFn& y, const GridPtr& g);

// ---- Bessel basis lemma ---------------------------------------------------

// Even solution of y'' + 2(1-2x)/(x(1-x)) y' - 2(3x^2-3x+1)/(x^2(1-x)^2) y = 0,
// fixed by its Ferrers-function representation (sign chosen so that y0 > 0).
double y0_at_half();

struct AppendixReport {
  double y0_half;
  double y0_parity_defect;
  double f0_parity_defect;
  double integral_cos;  // int_0^1 f0 cos(2 pi x)
  double integral_t;    // int_0^{1/2} t f0
  double integral_t3;   // int_0^{1/2} t^3 f0
  double bc_over_K;     // (b + c/7) / K
  double b_over_K;
  double c_over_K;
  double b_over_K_rederived;  // with b + (2/7) c on the left of the first relation
  double system_smin;         // smallest singular value of the (b, c, K) system, scaled
  bool K_forced_zero;
  GridFn f0;
};
AppendixReport appendix_a_pipeline(const GridPtr& g);
std::string to_json(const AppendixReport& r);

struct FrameProbe {
  double smin;
  double cond;
};
// Gram matrix of the normalized family 1, Phi_0(n pi x), Phi_2((n+1) pi x), n <= N.
FrameProbe basis_frame_probe(int N, const GridPtr& g);

}  // namespace ispec
