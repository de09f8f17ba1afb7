#include "ispec/scatter.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace ispec {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

// prod_{n<=N} (1 - z / j_n^2)
cplx free_partial(const std::vector<double>& j, int N, cplx z) {
  cplx p = 1.0;
  for (int n = 0; n < N; ++n) p *= 1.0 - z / (j[n] * j[n]);
  return p;
}

// prod_{n>N} (1 - z / (j_n^2 + c)), from the closed form of the full free product.
cplx tail_model(Order o, const std::vector<double>& j, int N, double c, cplx z) {
  auto t0 = [&](cplx w) { return phi0_reference(o, w) / free_partial(j, N, w); };
  return t0(z - c) / t0(cplx(-c));
}

void check_clear(const std::vector<double>& ev, cplx lambda, const char* what) {
  for (double l : ev)
    if (std::abs(lambda - l) < 1e-8 * (1.0 + std::abs(l)))
      throw std::invalid_argument(std::string(what) + " is too close to an eigenvalue");
}

}  // namespace

cplx phi0_reference(Order o, cplx lambda) {
  const double nu = o.nu();
  if (std::abs(lambda) <= 4.0) {
    // sum (-lambda/4)^k / (k! (nu+1)_k)
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -lambda / (4.0 * k * (nu + k));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  const cplx z = std::sqrt(lambda);
  return std::pow(2.0, nu) * std::tgamma(nu + 1) * bessel_half(o, Branch::plus_nu, z) / std::pow(z, nu);
}

HadamardReport hadamard_report(Order o, const Potential& q, const Spectrum& s, cplx lambda, int N_prod,
                               double lambda_ref) {
  if (N_prod < 1 || s.N() < N_prod) throw std::invalid_argument("spectrum shorter than N_prod");
  const std::vector<double> ev(s.eigenvalues.begin(), s.eigenvalues.begin() + N_prod);
  check_clear(ev, lambda, "lambda");
  check_clear(ev, lambda_ref, "lambda_ref");

  HadamardReport rep;
  rep.m = std::abs(endpoint(o, 0.0, q).first) < 1e-8 ? 1 : 0;
  std::size_t skip = ev.size();
  if (rep.m == 1) {
    skip = 0;
    for (std::size_t n = 1; n < ev.size(); ++n)
      if (std::abs(ev[n]) < std::abs(ev[skip])) skip = n;
  }
  auto product = [&](cplx z) {
    cplx p = rep.m == 1 ? z : cplx(1.0);
    for (std::size_t n = 0; n < ev.size(); ++n)
      if (n != skip) p *= 1.0 - z / ev[n];
    return p;
  };
  const auto j = bessel_zeros(o, N_prod);
  const double c = q.mean();
  const cplx ref(lambda_ref, 0.0);
  rep.product_ratio = product(lambda) * tail_model(o, j, N_prod, c, lambda) /
                      (product(ref) * tail_model(o, j, N_prod, c, ref));
  rep.solver_ratio = endpoint(o, lambda, q).first / endpoint(o, ref, q).first;
  rep.residual = std::abs(rep.solver_ratio - rep.product_ratio) / std::abs(rep.solver_ratio);
  return rep;
}

HadamardReport hadamard_report(Order o, const Potential& q, cplx lambda, int N_prod, double lambda_ref) {
  return hadamard_report(o, q, dirichlet_spectrum(o, q, N_prod), lambda, N_prod, lambda_ref);
}

double hadamard_check(Order o, const Potential& q, cplx lambda, int N_prod, double lambda_ref) {
  return hadamard_report(o, q, lambda, N_prod, lambda_ref).residual;
}

JostPair jost_solutions(Order o) {
  const double nu = o.nu();
  const cplx ep = std::exp(kI * (nu + 0.5) * (kPi / 2)), em = std::conj(ep);
  const double s = std::sqrt(kPi / 2);
  const cplx one(1.0, 0.0);
  const cplx h1 = hankel1_half(o, one), h2 = hankel2_half(o, one);
  // d/dr sqrt(r) H(r) = H / (2 sqrt r) + sqrt(r) H'
  JostPair f;
  f.fp = ep * s * h1;
  f.dfp = ep * s * (0.5 * h1 + hankel1_half_deriv(o, one));
  f.fm = em * s * h2;
  f.dfm = em * s * (0.5 * h2 + hankel2_half_deriv(o, one));
  return f;
}

JostData jost_match(Order o, const Potential& q) {
  const auto f = jost_solutions(o);
  const cplx W = f.wronskian();
  JostData d;
  d.order = o;
  d.wronskian_check = std::abs(W + 2.0 * kI);
  if (std::abs(W) < 1e-12) throw SolverError("Jost solutions are dependent");
  const auto [phi, dphi] = endpoint(o, 1.0, q);
  d.phi1 = phi;
  d.dphi1 = dphi;
  d.alpha = (phi * f.dfm - dphi * f.fm) / W;
  d.beta = (f.fp * dphi - f.dfp * phi) / W;
  if (std::abs(d.alpha) == 0.0 || std::abs(d.beta) == 0.0) throw SolverError("vanishing Jost function");
  d.sigma = std::exp(kI * kPi * (o.nu() + 0.5)) * d.alpha / d.beta;
  return d;
}

std::string to_json(const JostData& d) {
  nlohmann::json j;
  j["ell"] = d.order.ell;
  j["alpha_re"] = d.alpha.real();
  j["alpha_im"] = d.alpha.imag();
  j["sigma_re"] = d.sigma.real();
  j["sigma_im"] = d.sigma.imag();
  j["wronskian_check"] = d.wronskian_check;
  return j.dump(2);
}

}  // namespace ispec
