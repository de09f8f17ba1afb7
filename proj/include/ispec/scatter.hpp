// Regular solution at r = 1, its canonical product, and the Jost functions
// at the fixed energy lambda = 1.
#pragma once

#include <string>
#include <vector>

#include "ispec/spectral.hpp"

namespace ispec {

// 2^nu Gamma(nu+1) lambda^{-nu/2} J_nu(sqrt(lambda)), principal branch.
cplx phi0_reference(Order o, cplx lambda);

struct HadamardReport {
  double residual = 0.0;  // relative, after calibration at lambda_ref
  int m = 0;              // order of the zero at lambda = 0
  cplx solver_ratio, product_ratio;
};

// phi(1, nu, lambda) / phi(1, nu, lambda_ref) against
// lambda^m prod (1 - lambda/lambda_n) over the same ratio. The factors beyond
// N_prod are modelled by lambda_n ~ j_{nu,n}^2 + int q.
HadamardReport hadamard_report(Order o, const Potential& q, cplx lambda, int N_prod, double lambda_ref = -1.0);
double hadamard_check(Order o, const Potential& q, cplx lambda, int N_prod, double lambda_ref = -1.0);

// Same, with the Dirichlet spectrum already known (at least N_prod values).
HadamardReport hadamard_report(Order o, const Potential& q, const Spectrum& s, cplx lambda, int N_prod,
                               double lambda_ref = -1.0);

// f^{+-}(r, nu, 1) and r-derivatives at r = 1.
struct JostPair {
  cplx fp, dfp, fm, dfm;
  cplx wronskian() const { return fp * dfm - dfp * fm; }
};
JostPair jost_solutions(Order o);

struct JostData {
  Order order;
  cplx alpha, beta, sigma;
  double phi1 = 0.0, dphi1 = 0.0;
  double wronskian_check = 0.0;  // |W(f+, f-) + 2i|
};

JostData jost_match(Order o, const Potential& q);
std::string to_json(const JostData& d);

}  // namespace ispec
