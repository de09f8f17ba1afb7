// The two-spectra map q -> (int q, lambda~_{l1,n}, lambda~_{l2,n}), its
// differential at q = 0 and local reconstruction by Gauss-Newton.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ispec/spectral.hpp"

namespace ispec {

struct Pair {
  int l1 = 0, l2 = 1;
};

struct SpectralImage {
  double mean = 0.0;
  std::vector<double> seq1, seq2;
  int N() const { return static_cast<int>(seq1.size()); }
  // (mean, seq1, seq2) stacked.
  Eigen::VectorXd stacked() const;
};

SpectralImage spectral_map(Pair p, const Potential& q, int N);
// Builds an image from two stored spectra and the mean of the potential.
SpectralImage image_from_spectra(const Spectrum& s1, const Spectrum& s2, double mean);

struct LinearizedOperator {
  Pair pair;
  int N = 0;
  Eigen::MatrixXd matrix;  // (2N+1) x grid size; row . zeta is the quadrature sum
  Eigen::MatrixXd A, K;    // matrix = A + K
  Eigen::VectorXd apply(const GridFn& zeta) const;
};

// Rows: the weights (mean), then w_i (psi_{l,n}(x_i)^2 - 1) with normalized
// eigenfunctions of the free problem. The A part replaces psi^2 by
// 2 Phi_l((n + l/2) pi x).
LinearizedOperator d0_rows(Pair p, int N, const GridPtr& g);

struct KernelProbe {
  double smax = 0.0, smin = 0.0;
  int kernel_dim_estimate = 0;
  std::vector<double> singular_values;
};
// Singular values of the rows restricted to the first `trial_dim` mean-zero
// shifted Legendre polynomials.
KernelProbe kernel_probe(Pair p, int N, const GridPtr& g, int trial_dim = 25, double rel_tol = 1e-6);

struct ReconstructOptions {
  int max_iter = 20;
  double tol = 1e-10;        // on the image misfit (Euclidean)
  double sigma_cut = 1e-3;   // relative truncated-SVD cutoff
  int max_halvings = 3;
  double warn_norm = 1.0;    // warn when the target misfit from zero exceeds this
};

struct ReconstructReport {
  Pair pair;
  int N = 0;
  int iterations = 0;
  std::vector<double> misfit_history;
  double q_error = -1.0;  // L2 error against a known potential, if supplied
  double sigma_cut = 0.0;
  bool converged = false;
  bool diverged = false;
  bool large_target = false;
  std::string to_json() const;
};

struct Reconstruction {
  Potential q_hat;
  ReconstructReport report;
};

// Unknowns: the mean plus cos(k pi x), k = 1..2N.
Reconstruction reconstruct(Pair p, const SpectralImage& target, const GridPtr& g,
                           const ReconstructOptions& opt = {}, const GridFn* q_true = nullptr);

}  // namespace ispec
