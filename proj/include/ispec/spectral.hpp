// Regular solutions of -u'' + (l(l+1)/r^2 + q) u = lambda u on (0,1), Dirichlet
// spectra and their first variation.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ispec/errors.hpp"
#include "ispec/funcspace.hpp"
#include "ispec/special_fn.hpp"

namespace ispec {

// Real potential on a grid; evaluated between nodes by the panel interpolant.
class Potential {
 public:
  explicit Potential(GridFn values);
  static Potential zero(const GridPtr& g);
  static Potential constant(const GridPtr& g, double c);
  static Potential from_fn(const GridPtr& g, const std::function<double(double)>& f);

  const GridFn& values() const { return values_; }
  const GridPtr& grid() const { return values_.grid; }
  double mean() const { return mean_; }
  double min_value() const { return min_; }
  double max_value() const { return max_; }
  bool is_zero() const { return zero_; }
  std::uint64_t hash() const;

  double operator()(double r) const;

  // Stage values l(l+1)/r^2 + q(r) on an integration mesh, memoized per (l, mesh).
  std::shared_ptr<const std::vector<double>> stage_values(Order o, const void* mesh) const;

 private:
  struct StageCache {
    std::mutex mu;
    std::map<std::pair<int, const void*>, std::shared_ptr<const std::vector<double>>> stages;
  };
  GridFn values_;
  double mean_ = 0.0, min_ = 0.0, max_ = 0.0;
  bool zero_ = true;
  std::shared_ptr<StageCache> cache_;
};

Potential operator+(const Potential& q, const GridFn& dq);

struct RegularSolution {
  Order order;
  cplx lambda;
  CGridFn phi, dphi;  // at grid nodes; nodes below r0 use the Frobenius term
  double r0 = 0.0;
  cplx phi1, dphi1;   // phi(1), phi'(1)
};

// Start radius for a given lambda (constant on dyadic lambda buckets).
double start_radius(double abs_lambda);

RegularSolution regular_solution(Order o, cplx lambda, const Potential& q);
// Only (phi(1), phi'(1)); cheaper, no node storage.
std::pair<double, double> endpoint(Order o, double lambda, const Potential& q);
std::pair<cplx, cplx> endpoint(Order o, cplx lambda, const Potential& q);

struct Spectrum {
  Order order;
  std::vector<double> eigenvalues;
  std::uint64_t potential_hash = 0;
  double root_tol = 1e-10;
  int N() const { return static_cast<int>(eigenvalues.size()); }
};

inline constexpr double kRootTol = 1e-10;

Spectrum dirichlet_spectrum(Order o, const Potential& q, int N);
std::string to_json(const Spectrum& s);
// Inverse of to_json; throws nlohmann::json::exception or std::invalid_argument.
Spectrum spectrum_from_json(const std::string& text);

// L2-normalized real eigenfunction at a known eigenvalue, positive near 0.
GridFn eigenfunction_at(Order o, double lambda, const Potential& q);
GridFn eigenfunction(Order o, int n, const Potential& q);

// int zeta psi^2 with psi normalized.
double frechet_derivative(Order o, int n, const Potential& q, const GridFn& zeta);
double frechet_derivative_at(Order o, double lambda, const Potential& q, const GridFn& zeta);

struct Remainders {
  std::vector<double> values;        // lambda~_n, n = 1..N
  std::vector<double> partial_sums;  // sum_{k<=n} lambda~_k^2
};

// lambda_n - (n + l/2)^2 pi^2 - int q + l(l+1).
Remainders remainder_sequence(Order o, const Potential& q, int N);
Remainders remainders_from(const Spectrum& s, double mean_q);

}  // namespace ispec
