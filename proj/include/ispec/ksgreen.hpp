// Kneser-Sommerfeld series, the Green identity built from it, and the
// reduced trigonometric identity.
#pragma once

#include <string>
#include <vector>

#include "ispec/funcspace.hpp"
#include "ispec/special_fn.hpp"

namespace ispec {

enum class TailMode { none, integral_compensation };

struct KSQuery {
  Order order;
  double x = 0.0;
  double X = 0.0;
  cplx z;
  int n_terms = 400;
  TailMode tail = TailMode::integral_compensation;
};

struct KSValue {
  cplx lhs;   // truncated series, plus the tail estimate when requested
  cplx rhs;
  double residual;
};

// Throws std::domain_error for 0 <= x <= X <= 1 violations and for z within
// 1e-3 of a zero j_{nu,n}.
KSValue ks_evaluate(const KSQuery& q);
double ks_residual(const KSQuery& q);
cplx ks_rhs(Order o, double x, double X, cplx z);
// nu = 1/2 closed form  -sin(xz) sin((1-X)z) / (2 z sin z sqrt(xX)).
cplx ks_half_closed_form(double x, double X, cplx z);
std::string ks_csv(const std::vector<KSQuery>& qs);

// int_0^1 x zeta J(xz) [J(z) Y(xz) - Y(z) J(xz)] dx
cplx green_functional(Order o, const GridFn& zeta, cplx z);

struct GreenValue {
  cplx lhs, rhs;
  double residual;
};

GreenValue green_evaluate(Order o, const GridFn& zeta, cplx z, int n_terms = 400,
                          TailMode tail = TailMode::integral_compensation);
double green_residual(Order o, const GridFn& zeta, cplx z, int n_terms = 400,
                      TailMode tail = TailMode::integral_compensation);
// int_0^1 x zeta J_nu(j_n x)^2 dx, resolved for large j_n.
double bessel_moment(Order o, const GridFn& zeta, double j);

struct MomentValue {
  double moment;       // int x zeta (1 - x^{2 nu})
  double green_limit;  // -4 nu * RHS of the Green identity at z_small; tends to `moment`
};

MomentValue moment_functional(Order o, const GridFn& zeta, double z_small = 1e-3);

// int T_l[zeta] [P_l(1/z) cos(z(2x-1)) - Q_{l-1}(1/z) sin(z(2x-1))] dx
cplx reduced_identity_direct(int ell, const GridFn& zeta, cplx z);
// Same quantity through J_nu(z), J_{-nu}(z) and the sin/cos transforms of T_l[zeta].
cplx reduced_identity_bessel(int ell, const GridFn& zeta, cplx z);
double reduced_identity_residual(int ell, const GridFn& zeta, cplx z);

}  // namespace ispec
