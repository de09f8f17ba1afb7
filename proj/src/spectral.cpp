#include "ispec/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <json.hpp>

namespace ispec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Mesh step controls: relative to r near the origin, relative to the local
// wavelength, and an absolute cap.
constexpr double kStepPerRadius = 0.08;
constexpr double kStepPerWave = 0.12;
constexpr double kStepMax = 0.02;

std::uint64_t fnv(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

double bucket(double abs_lambda) { return std::exp2(std::ceil(std::log2(1.0 + abs_lambda))); }

struct Mesh {
  std::vector<double> r;     // r[0] = r0, r.back() = 1
  std::vector<int> node;     // grid node index at r[i], or -1
  std::size_t first_node = 0;  // first grid node >= r0
};

using MeshKey = std::tuple<std::uint64_t, double>;

std::shared_ptr<const Mesh> mesh_for(const Grid& g, double abs_lambda) {
  static std::mutex mu;
  static std::map<MeshKey, std::shared_ptr<const Mesh>> cache;
  const double lam_b = bucket(abs_lambda);
  const MeshKey key{g.hash(), lam_b};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto m = std::make_shared<Mesh>();
  const double r0 = start_radius(abs_lambda);
  const double hwave = kStepPerWave / std::sqrt(lam_b);
  std::vector<std::pair<double, int>> pts{{r0, -1}};
  const auto& x = g.nodes();
  m->first_node = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r0) - x.begin());
  for (std::size_t i = m->first_node; i < x.size(); ++i) pts.emplace_back(x[i], static_cast<int>(i));
  if (pts.back().first < 1.0) pts.emplace_back(1.0, -1);
  m->r.push_back(pts[0].first);
  m->node.push_back(pts[0].second);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].first, b = pts[i + 1].first;
    const double h = std::min({kStepPerRadius * a, hwave, kStepMax});
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    for (int k = 1; k < n; ++k) {
      m->r.push_back(a + (b - a) * k / n);
      m->node.push_back(-1);
    }
    m->r.push_back(b);
    m->node.push_back(pts[i + 1].second);
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, m);
  return m;
}

template <class T>
using State = std::array<T, 2>;

// r^a (1 + c r^2), a = nu + 1/2, c = (q(0) - lambda) / (4 nu + 4)
template <class T>
State<T> frobenius(double nu, double r, T lambda, double q0) {
  const double a = nu + 0.5;
  const T c = (q0 - lambda) / (4 * nu + 4);
  const double ra = std::pow(r, a);
  return {ra * (1.0 + c * r * r), ra / r * (a + c * (a + 2) * r * r)};
}

// Fehlberg 7(8) tableau; only the eighth-order solution is used.
struct Tableau {
  std::array<std::array<double, 12>, 13> a{};
  std::array<double, 13> b{}, c{};
  Tableau() {
    namespace ode = boost::numeric::odeint;
    auto put = [&](int s, const auto& row) {
      for (std::size_t j = 0; j < row.size(); ++j) a[s][j] = row[j];
    };
    put(1, ode::rk78_coefficients_a1<double>());
    put(2, ode::rk78_coefficients_a2<double>());
    put(3, ode::rk78_coefficients_a3<double>());
    put(4, ode::rk78_coefficients_a4<double>());
    put(5, ode::rk78_coefficients_a5<double>());
    put(6, ode::rk78_coefficients_a6<double>());
    put(7, ode::rk78_coefficients_a7<double>());
    put(8, ode::rk78_coefficients_a8<double>());
    put(9, ode::rk78_coefficients_a9<double>());
    put(10, ode::rk78_coefficients_a10<double>());
    put(11, ode::rk78_coefficients_a11<double>());
    put(12, ode::rk78_coefficients_a12<double>());
    const ode::rk78_coefficients_b<double> bb;
    const ode::rk78_coefficients_c<double> cc;
    for (int i = 0; i < 13; ++i) b[i] = bb[i], c[i] = cc[i];
  }
};

const Tableau& tableau() {
  static const Tableau t;
  return t;
}

// l(l+1)/r^2 + q(r) at every stage point of the mesh.
std::shared_ptr<const std::vector<double>> stage_potential(Order o, const Potential& q, const Mesh& mesh) {
  const auto& tb = tableau();
  auto v = std::make_shared<std::vector<double>>((mesh.r.size() - 1) * 13);
  const double cent = o.ell * (o.ell + 1.0);
  for (std::size_t i = 0; i + 1 < mesh.r.size(); ++i) {
    const double h = mesh.r[i + 1] - mesh.r[i];
    for (int s = 0; s < 13; ++s) {
      const double r = mesh.r[i] + tb.c[s] * h;
      (*v)[13 * i + s] = cent / (r * r) + (q.is_zero() ? 0.0 : q(r));
    }
  }
  return v;
}

// Fixed mesh integration of (phi, phi'); `visit(i, state)` runs at every mesh point.
template <class T, class Visit>
State<T> march(Order o, T lambda, const Potential& q, const Mesh& mesh, const std::vector<double>& V,
                   Visit&& visit) {
  const auto& tb = tableau();
  const double nu = o.nu();
  const double r0 = mesh.r[0];
  State<T> s = frobenius<T>(nu, r0, lambda, q.is_zero() ? 0.0 : q(r0));
  visit(0, s);
  std::array<T, 13> k0, k1;
  for (std::size_t i = 0; i + 1 < mesh.r.size(); ++i) {
    const double h = mesh.r[i + 1] - mesh.r[i];
    const double* v = V.data() + 13 * i;
    for (int st = 0; st < 13; ++st) {
      T y0 = s[0], y1 = s[1];
      for (int j = 0; j < st; ++j) {
        y0 += h * tb.a[st][j] * k0[j];
        y1 += h * tb.a[st][j] * k1[j];
      }
      k0[st] = y1;
      k1[st] = (v[st] - lambda) * y0;
    }
    for (int st = 0; st < 13; ++st) {
      if (tb.b[st] == 0.0) continue;
      s[0] += h * tb.b[st] * k0[st];
      s[1] += h * tb.b[st] * k1[st];
    }
    if (!std::isfinite(std::abs(s[0])) || !std::isfinite(std::abs(s[1])))
      throw SolverError("regular solution overflow at lambda=" + std::to_string(std::abs(lambda)) +
                        ", r=" + std::to_string(mesh.r[i + 1]));
    visit(i + 1, s);
  }
  return s;
}

template <class T>
std::pair<T, T> endpoint_impl(Order o, T lambda, const Potential& q) {
  const auto mesh = mesh_for(*q.grid(), std::abs(lambda));
  const auto V = q.stage_values(o, mesh.get());
  const auto s = march<T>(o, lambda, q, *mesh, *V, [](std::size_t, const State<T>&) {});
  return {s[0], s[1]};
}

template <class F>
std::vector<double> parallel_map(const std::vector<double>& xs, F&& f) {
  std::vector<double> out(xs.size());
  const std::size_t nt = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < nt; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < xs.size(); i += nt) out[i] = f(xs[i]);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace

// ---- Potential -------------------------------------------------------------

Potential::Potential(GridFn values) : values_(std::move(values)), cache_(std::make_shared<StageCache>()) {
  mean_ = integrate(values_);
  min_ = max_ = values_.values.empty() ? 0.0 : values_[0];
  zero_ = true;
  for (double v : values_.values) {
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
    if (v != 0.0) zero_ = false;
  }
}

Potential Potential::zero(const GridPtr& g) { return Potential(GridFn(g)); }

Potential Potential::constant(const GridPtr& g, double c) {
  return Potential(sample(g, [c](double) { return c; }));
}

Potential Potential::from_fn(const GridPtr& g, const std::function<double(double)>& f) {
  return Potential(sample(g, f));
}

std::uint64_t Potential::hash() const {
  std::uint64_t h = grid()->hash();
  return fnv(h, values_.values.data(), values_.values.size() * sizeof(double));
}

double Potential::operator()(double r) const {
  const Grid& g = *values_.grid;
  const int p = g.panel_of(r);
  const int m = g.nodes_per_panel();
  const double a = g.edges()[p], b = g.edges()[p + 1];
  const double s = (2.0 * r - a - b) / (b - a);
  const auto& rx = g.ref_nodes();
  const auto& bw = g.bary_weights();
  const double* v = values_.values.data() + static_cast<std::size_t>(p) * m;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < m; ++j) {
    const double d = s - rx[j];
    if (d == 0.0) return v[j];
    const double w = bw[j] / d;
    num += w * v[j];
    den += w;
  }
  return num / den;
}

std::shared_ptr<const std::vector<double>> Potential::stage_values(Order o, const void* mesh) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  const auto key = std::make_pair(o.ell, mesh);
  auto it = cache_->stages.find(key);
  if (it != cache_->stages.end()) return it->second;
  auto v = stage_potential(o, *this, *static_cast<const Mesh*>(mesh));
  cache_->stages.emplace(key, v);
  return v;
}

Potential operator+(const Potential& q, const GridFn& dq) { return Potential(q.values() + dq); }

// ---- regular solution ------------------------------------------------------

double start_radius(double abs_lambda) { return 1e-4 / std::sqrt(bucket(abs_lambda)); }

RegularSolution regular_solution(Order o, cplx lambda, const Potential& q) {
  const auto& g = q.grid();
  const auto mesh = mesh_for(*g, std::abs(lambda));
  RegularSolution out{o, lambda, CGridFn(g), CGridFn(g), mesh->r[0], {}, {}};
  const auto V = q.stage_values(o, mesh.get());
  const double nu = o.nu();
  for (std::size_t i = 0; i < mesh->first_node; ++i) {
    const double r = g->node(i);
    const auto f = frobenius<cplx>(nu, r, lambda, q.is_zero() ? 0.0 : q(r));
    out.phi[i] = f[0];
    out.dphi[i] = f[1];
  }
  auto store = [&](std::size_t i, const auto& s) {
    const int k = mesh->node[i];
    if (k >= 0) {
      out.phi[k] = s[0];
      out.dphi[k] = s[1];
    }
  };
  if (lambda.imag() == 0.0) {
    const auto s = march<double>(o, lambda.real(), q, *mesh, *V, store);
    out.phi1 = s[0];
    out.dphi1 = s[1];
  } else {
    const auto s = march<cplx>(o, lambda, q, *mesh, *V, store);
    out.phi1 = s[0];
    out.dphi1 = s[1];
  }
  return out;
}

std::pair<double, double> endpoint(Order o, double lambda, const Potential& q) {
  return endpoint_impl<double>(o, lambda, q);
}

std::pair<cplx, cplx> endpoint(Order o, cplx lambda, const Potential& q) {
  return endpoint_impl<cplx>(o, lambda, q);
}

// ---- spectrum --------------------------------------------------------------

Spectrum dirichlet_spectrum(Order o, const Potential& q, int N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  if (!std::isfinite(q.mean()) || !std::isfinite(q.min_value()) || !std::isfinite(q.max_value()))
    throw std::invalid_argument("potential is not finite");
  const double j1 = bessel_zero(o, 1), jN = bessel_zero(o, N);
  const double lo = q.min_value() + j1 * j1 - 1.0;
  const double hi = std::max(std::pow(N + 1 + 0.5 * o.ell, 2) * kPi * kPi + q.mean() + 10.0,
                             jN * jN + q.max_value() + 1.0);
  // gaps grow like 2 pi sqrt(lambda); the node-count audit below catches misses
  const double step = 0.9 * kPi * kPi / 4.0;
  std::vector<double> lam;
  for (double l = lo;; l += std::max(step, 0.25 * kPi * std::sqrt(l - lo))) {
    lam.push_back(l);
    if (l >= hi) break;
  }
  const auto f = parallel_map(lam, [&](double l) { return endpoint(o, l, q).first; });

  std::vector<std::pair<double, double>> brackets;
  for (std::size_t i = 0; i + 1 < lam.size() && static_cast<int>(brackets.size()) < N; ++i) {
    if (f[i] == 0.0) {
      brackets.emplace_back(lam[i], lam[i]);
    } else if ((f[i] > 0) != (f[i + 1] > 0) && f[i + 1] != 0.0) {
      brackets.emplace_back(lam[i], lam[i + 1]);
    }
  }
  if (static_cast<int>(brackets.size()) < N)
    throw SolverError("missed-root audit: found " + std::to_string(brackets.size()) + " of " +
                      std::to_string(N) + " eigenvalues below " + std::to_string(hi));

  std::vector<double> mids(N);
  for (int n = 0; n < N; ++n) mids[n] = n;
  Spectrum s{o, {}, q.hash(), kRootTol};
  s.eigenvalues = parallel_map(mids, [&](double nd) {
    const auto [a, b] = brackets[static_cast<std::size_t>(nd)];
    double root = a;
    if (a != b) {
      std::uintmax_t it = 200;
      auto fn = [&](double l) { return endpoint(o, l, q).first; };
      const auto r = boost::math::tools::toms748_solve(fn, a, b, boost::math::tools::eps_tolerance<double>(52), it);
      root = 0.5 * (r.first + r.second);
    }
    // node count on the integration mesh, which resolves every half wave
    const auto mesh = mesh_for(*q.grid(), std::abs(root));
    const auto V = q.stage_values(o, mesh.get());
    const double cut = 1.0 - 0.25 * kPi / std::sqrt(std::abs(root) + 1.0);
    double scale = 0.0, prev = 0.0;
    int nodes = 0;
    const auto end = march<double>(o, root, q, *mesh, *V, [&](std::size_t i, const State<double>& st) {
      scale = std::max(scale, std::abs(st[0]));
      if (mesh->r[i] >= cut || st[0] == 0.0) return;
      if (prev != 0.0 && (st[0] > 0) != (prev > 0)) ++nodes;
      prev = st[0];
    });
    const int n = static_cast<int>(nd) + 1;
    if (std::abs(end[0]) > kRootTol * scale)
      throw SolverError("eigenvalue " + std::to_string(n) + " failed the root tolerance");
    if (nodes != n - 1)
      throw SolverError("missed-root audit: eigenfunction " + std::to_string(n) + " has the wrong node count");
    return root;
  });
  for (int n = 1; n < N; ++n)
    if (!(s.eigenvalues[n] > s.eigenvalues[n - 1])) throw SolverError("eigenvalues not strictly increasing");
  return s;
}

std::string to_json(const Spectrum& s) {
  nlohmann::json j;
  j["ell"] = s.order.ell;
  j["N"] = s.N();
  j["eigenvalues"] = s.eigenvalues;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(s.potential_hash));
  j["potential_hash"] = buf;
  j["tolerances"] = {{"root", s.root_tol}, {"scan_step", 0.9 * kPi * kPi / 4.0}};
  return j.dump(2);
}

Spectrum spectrum_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Spectrum s;
  s.order = Order{j.at("ell").get<int>()};
  s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  if (j.contains("potential_hash"))
    s.potential_hash = std::stoull(j["potential_hash"].get<std::string>(), nullptr, 16);
  if (j.contains("tolerances") && j["tolerances"].contains("root")) s.root_tol = j["tolerances"]["root"].get<double>();
  if (j.contains("N") && j["N"].get<int>() != s.N()) throw std::invalid_argument("N does not match eigenvalue count");
  return s;
}

GridFn eigenfunction_at(Order o, double lambda, const Potential& q) {
  const auto rs = regular_solution(o, lambda, q);
  GridFn f(q.grid());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rs.phi[i].real();
  return (1.0 / l2_norm(f)) * f;
}

GridFn eigenfunction(Order o, int n, const Potential& q) {
  const auto s = dirichlet_spectrum(o, q, n);
  return eigenfunction_at(o, s.eigenvalues.back(), q);
}

double frechet_derivative_at(Order o, double lambda, const Potential& q, const GridFn& zeta) {
  const auto psi = eigenfunction_at(o, lambda, q);
  return inner(zeta, mul(psi, psi));
}

double frechet_derivative(Order o, int n, const Potential& q, const GridFn& zeta) {
  const auto s = dirichlet_spectrum(o, q, n);
  return frechet_derivative_at(o, s.eigenvalues.back(), q, zeta);
}

Remainders remainders_from(const Spectrum& s, double mean_q) {
  const int l = s.order.ell;
  Remainders r;
  double acc = 0.0;
  for (int n = 1; n <= s.N(); ++n) {
    const double v = s.eigenvalues[n - 1] - std::pow(n + 0.5 * l, 2) * kPi * kPi - mean_q + l * (l + 1.0);
    r.values.push_back(v);
    acc += v * v;
    r.partial_sums.push_back(acc);
  }
  return r;
}

Remainders remainder_sequence(Order o, const Potential& q, int N) {
  return remainders_from(dirichlet_spectrum(o, q, N), q.mean());
}

}  // namespace ispec
