#include "ispec/linmap.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

#include <json.hpp>

namespace ispec {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Evaluation {
  SpectralImage image;
  Spectrum s1, s2;
};

Evaluation evaluate(Pair p, const Potential& q, int N) {
  auto f1 = std::async(std::launch::async, [&] { return dirichlet_spectrum({p.l1}, q, N); });
  Spectrum s2 = dirichlet_spectrum({p.l2}, q, N);
  Spectrum s1 = f1.get();
  Evaluation e{image_from_spectra(s1, s2, q.mean()), std::move(s1), std::move(s2)};
  return e;
}

}  // namespace

Eigen::VectorXd SpectralImage::stacked() const {
  Eigen::VectorXd v(1 + seq1.size() + seq2.size());
  v(0) = mean;
  for (std::size_t i = 0; i < seq1.size(); ++i) v(1 + i) = seq1[i];
  for (std::size_t i = 0; i < seq2.size(); ++i) v(1 + seq1.size() + i) = seq2[i];
  return v;
}

SpectralImage image_from_spectra(const Spectrum& s1, const Spectrum& s2, double mean) {
  if (s1.N() != s2.N()) throw std::invalid_argument("spectra must have the same length");
  return {mean, remainders_from(s1, mean).values, remainders_from(s2, mean).values};
}

SpectralImage spectral_map(Pair p, const Potential& q, int N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  return evaluate(p, q, N).image;
}

Eigen::VectorXd LinearizedOperator::apply(const GridFn& zeta) const {
  const Eigen::Map<const Eigen::VectorXd> z(zeta.values.data(), static_cast<Eigen::Index>(zeta.size()));
  if (z.size() != matrix.cols()) throw std::invalid_argument("grid size mismatch");
  return matrix * z;
}

LinearizedOperator d0_rows(Pair p, int N, const GridPtr& g) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(g->size());
  LinearizedOperator L;
  L.pair = p;
  L.N = N;
  L.matrix.resize(2 * N + 1, n);
  L.A.resize(2 * N + 1, n);
  for (Eigen::Index i = 0; i < n; ++i) L.matrix(0, i) = L.A(0, i) = g->weight(i);
  int row = 1;
  for (int l : {p.l1, p.l2}) {
    const Order o{l};
    const auto js = bessel_zeros(o, N);
    for (int k = 1; k <= N; ++k, ++row) {
      const double j = js[k - 1], d = bessel_half_deriv(o, j);
      const double a = (k + 0.5 * l) * kPi;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = g->node(i), w = g->weight(i);
        const double jx = bessel_half(o, Branch::plus_nu, j * x);
        L.matrix(row, i) = w * (2 * x * jx * jx / (d * d) - 1);
        L.A(row, i) = w * (2 * phi_psi(l, a * x).phi - 1);
      }
    }
  }
  L.K = L.matrix - L.A;
  return L;
}

KernelProbe kernel_probe(Pair p, int N, const GridPtr& g, int trial_dim, double rel_tol) {
  if (trial_dim < 1) throw std::invalid_argument("trial_dim must be positive");
  const auto L = d0_rows(p, N, g);
  const Eigen::Index n = static_cast<Eigen::Index>(g->size());
  // shifted Legendre P_k(2x - 1), k = 1..trial_dim, unit L2 norm
  Eigen::MatrixXd V(n, trial_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 2 * g->node(i) - 1;
    double pm = 1.0, pk = t;
    for (int k = 1; k <= trial_dim; ++k) {
      V(i, k - 1) = pk * std::sqrt(2.0 * k + 1);
      const double next = ((2 * k + 1) * t * pk - k * pm) / (k + 1);
      pm = pk;
      pk = next;
    }
  }
  const Eigen::MatrixXd M = L.matrix * V;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto s = svd.singularValues();
  KernelProbe kp;
  kp.smax = s(0);
  kp.smin = s(s.size() - 1);
  for (int i = 0; i < s.size(); ++i) {
    kp.singular_values.push_back(s(i));
    if (s(i) < rel_tol * kp.smax) ++kp.kernel_dim_estimate;
  }
  // columns beyond the row count are kernel directions as well
  kp.kernel_dim_estimate += std::max<int>(0, trial_dim - static_cast<int>(s.size()));
  return kp;
}

std::string ReconstructReport::to_json() const {
  nlohmann::json j;
  j["pair"] = {pair.l1, pair.l2};
  j["N"] = N;
  j["iterations"] = iterations;
  j["misfit_history"] = misfit_history;
  if (q_error >= 0)
    j["q_error_if_known"] = q_error;
  else
    j["q_error_if_known"] = nullptr;
  j["sigma_cut"] = sigma_cut;
  j["converged"] = converged;
  j["diverged"] = diverged;
  j["large_target"] = large_target;
  return j.dump(2);
}

Reconstruction reconstruct(Pair p, const SpectralImage& target, const GridPtr& g, const ReconstructOptions& opt,
                           const GridFn* q_true) {
  const int N = target.N();
  if (N < 1 || static_cast<int>(target.seq2.size()) != N) throw std::invalid_argument("malformed target");
  const int dim = 2 * N + 1;
  std::vector<GridFn> basis{sample(g, [](double) { return 1.0; })};
  for (int k = 1; k < dim; ++k) basis.push_back(sample(g, [k](double x) { return std::cos(k * kPi * x); }));
  auto potential = [&](const Eigen::VectorXd& c) {
    GridFn q(g);
    for (int k = 0; k < dim; ++k) q += c(k) * basis[k];
    return Potential(q);
  };
  const Eigen::VectorXd t = target.stacked();

  ReconstructReport rep;
  rep.pair = p;
  rep.N = N;
  rep.sigma_cut = opt.sigma_cut;

  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
  Potential q = potential(c);
  Evaluation ev = evaluate(p, q, N);
  Eigen::VectorXd r = ev.image.stacked() - t;
  double misfit = r.norm();
  rep.large_target = misfit > opt.warn_norm;
  rep.misfit_history.push_back(misfit);

  std::vector<double> basis_mean(dim);
  for (int k = 0; k < dim; ++k) basis_mean[k] = integrate(basis[k]);

  while (misfit >= opt.tol && rep.iterations < opt.max_iter) {
    // Jacobian in the coefficient basis
    Eigen::MatrixXd J(dim, dim);
    for (int k = 0; k < dim; ++k) J(0, k) = basis_mean[k];
    auto rows = [&](const Spectrum& s, int offset) {
      for (int n = 0; n < N; ++n) {
        const GridFn psi = eigenfunction_at(s.order, s.eigenvalues[n], q);
        const GridFn sq = mul(psi, psi);
        for (int k = 0; k < dim; ++k) J(offset + n, k) = inner(basis[k], sq) - basis_mean[k];
      }
    };
    auto f1 = std::async(std::launch::async, [&] { rows(ev.s1, 1); });
    rows(ev.s2, 1 + N);
    f1.get();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto sv = svd.singularValues();
    Eigen::VectorXd step = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) {
      if (sv(i) <= opt.sigma_cut * sv(0)) break;
      step -= svd.matrixV().col(i) * (svd.matrixU().col(i).dot(r) / sv(i));
    }

    bool accepted = false;
    double alpha = 1.0;
    for (int h = 0; h <= opt.max_halvings; ++h, alpha *= 0.5) {
      const Eigen::VectorXd cn = c + alpha * step;
      Potential qn = potential(cn);
      Evaluation en;
      try {
        en = evaluate(p, qn, N);
      } catch (const SolverError&) {
        continue;
      }
      const Eigen::VectorXd rn = en.image.stacked() - t;
      if (rn.norm() < misfit) {
        c = cn;
        q = std::move(qn);
        ev = std::move(en);
        r = rn;
        misfit = rn.norm();
        accepted = true;
        break;
      }
    }
    ++rep.iterations;
    if (!accepted) {
      rep.diverged = true;
      break;
    }
    rep.misfit_history.push_back(misfit);
  }
  rep.converged = misfit < opt.tol;
  if (q_true) rep.q_error = l2_norm(q.values() - *q_true);
  return {q, rep};
}

}  // namespace ispec
