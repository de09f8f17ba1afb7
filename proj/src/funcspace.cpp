#include "ispec/funcspace.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ispec {

namespace {

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(m);
  if (!t) throw std::runtime_error("gauss-legendre table allocation failed");
  std::vector<std::pair<double, double>> xw(m);
  for (int i = 0; i < m; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &xw[i].first, &xw[i].second, t);
  gsl_integration_glfixed_table_free(t);
  std::sort(xw.begin(), xw.end());
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i) { x[i] = xw[i].first; w[i] = xw[i].second; }
  // Enforce exact symmetry of the reference rule.
  for (int i = 0; i < m / 2; ++i) {
    const double xs = 0.5 * (x[m - 1 - i] - x[i]);
    const double ws = 0.5 * (w[m - 1 - i] + w[i]);
    x[i] = -xs; x[m - 1 - i] = xs;
    w[i] = ws; w[m - 1 - i] = ws;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
}

std::uint64_t fnv1a(const std::vector<double>& v, std::uint64_t h = 1469598103934665603ull) {
  for (double d : v) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &d, sizeof d);
    for (unsigned char c : b) { h ^= c; h *= 1099511628211ull; }
  }
  return h;
}

void check_same(const GridPtr& a, const GridPtr& b) {
  if (a.get() != b.get() && (a->hash() != b->hash()))
    throw std::invalid_argument("grid mismatch");
}

}  // namespace

Grid::Grid(std::vector<double> edges, int m) : m_(m), edges_(std::move(edges)) {
  if (m < 2) throw std::invalid_argument("need at least 2 nodes per panel");
  gauss_legendre(m, ref_x_, ref_w_);
  bary_.resize(m);
  for (int j = 0; j < m; ++j) {
    double p = 1.0;
    for (int k = 0; k < m; ++k)
      if (k != j) p *= (ref_x_[j] - ref_x_[k]);
    bary_[j] = 1.0 / p;
  }
  Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double diag = 0.0;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      d1(i, j) = (bary_[j] / bary_[i]) / (ref_x_[i] - ref_x_[j]);
      diag -= d1(i, j);
    }
    d1(i, i) = diag;
  }
  ref_diff_.push_back(Eigen::MatrixXd::Identity(m, m));
  for (int k = 1; k < m; ++k) {
    Eigen::MatrixXd dk = d1 * ref_diff_.back();
    // Negative sum trick: rows of a derivative matrix annihilate constants.
    for (int i = 0; i < m; ++i) dk(i, i) = dk(i, i) - dk.row(i).sum();
    ref_diff_.push_back(std::move(dk));
  }

  const int P = panel_count();
  nodes_.reserve(static_cast<std::size_t>(P) * m);
  for (int p = 0; p < P; ++p) {
    const double a = edges_[p], b = edges_[p + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
      nodes_.push_back(c + h * ref_x_[i]);
      weights_.push_back(h * ref_w_[i]);
    }
  }
  // Mirror symmetric edge layouts exactly.
  bool sym = true;
  for (int p = 0; p <= P; ++p)
    if (std::abs(edges_[p] + edges_[P - p] - 1.0) > 1e-14) sym = false;
  if (sym) {
    const std::size_t n = nodes_.size();
    for (std::size_t i = n / 2; i < n; ++i) {
      nodes_[i] = 1.0 - nodes_[n - 1 - i];
      weights_[i] = weights_[n - 1 - i];
    }
    mirror_.resize(n);
    for (std::size_t i = 0; i < n; ++i) mirror_[i] = n - 1 - i;
  }
  hash_ = fnv1a(weights_, fnv1a(nodes_));
}

GridPtr Grid::standard(int panels, int m, int end_levels) {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("panel count must be even");
  if (end_levels < 0) throw std::invalid_argument("end_levels must be >= 0");
  const int half = panels / 2;
  std::vector<double> left{0.0};
  const double first = 2.0 * std::pow(0.5 / half, 2);
  for (int k = end_levels; k >= 1; --k) left.push_back(std::ldexp(first, -k));
  for (int i = 1; i <= half; ++i) {
    const double u = 0.5 * i / half;
    left.push_back(2.0 * u * u);
  }
  left.back() = 0.5;
  std::vector<double> e = left;
  for (std::size_t i = left.size() - 1; i-- > 0;) e.push_back(1.0 - left[i]);
  return GridPtr(new Grid(std::move(e), m));
}

GridPtr Grid::from_env() {
  int panels = 64;
  if (const char* s = std::getenv("ISPEC_GRID_PANELS")) {
    const int v = std::atoi(s);
    if (v >= 2 && v % 2 == 0) panels = v;
  }
  return standard(panels, 12, kDefaultEndLevels);
}

GridPtr Grid::uniform(double a, double b, int panels, int m) {
  if (!(b > a) || panels < 1) throw std::invalid_argument("bad uniform grid");
  std::vector<double> e(panels + 1);
  for (int i = 0; i <= panels; ++i) e[i] = a + (b - a) * i / panels;
  e.back() = b;
  return GridPtr(new Grid(std::move(e), m));
}

GridPtr Grid::from_edges(std::vector<double> edges, int m) {
  if (edges.size() < 2) throw std::invalid_argument("need at least one panel");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw std::invalid_argument("edges must increase");
  return GridPtr(new Grid(std::move(edges), m));
}

int Grid::panel_of(double x) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  int p = static_cast<int>(it - edges_.begin()) - 1;
  return std::clamp(p, 0, panel_count() - 1);
}

const Eigen::MatrixXd& Grid::ref_diff(int k) const {
  if (k < 0 || k >= m_) throw std::invalid_argument("derivative order too large for node count");
  return ref_diff_[k];
}

std::vector<double> Grid::lagrange_row(int p, double x) const {
  const double a = edges_[p], b = edges_[p + 1];
  const double s = (2.0 * x - a - b) / (b - a);
  std::vector<double> row(m_, 0.0);
  for (int j = 0; j < m_; ++j)
    if (s == ref_x_[j]) { row[j] = 1.0; return row; }
  double den = 0.0;
  for (int j = 0; j < m_; ++j) {
    row[j] = bary_[j] / (s - ref_x_[j]);
    den += row[j];
  }
  for (double& r : row) r /= den;
  return row;
}

// ---- GridFn --------------------------------------------------------------

template <class T>
GridFnT<T>::GridFnT(GridPtr g, std::vector<T> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) throw std::invalid_argument("value count does not match grid");
}

template <class T>
GridFnT<T>& GridFnT<T>::operator+=(const GridFnT& o) {
  check_same(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

template <class T>
GridFnT<T>& GridFnT<T>::operator-=(const GridFnT& o) {
  check_same(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

template <class T>
GridFnT<T>& GridFnT<T>::operator*=(T s) {
  for (auto& v : values) v *= s;
  return *this;
}

template struct GridFnT<double>;
template struct GridFnT<std::complex<double>>;

GridFn sample(const GridPtr& g, const std::function<double(double)>& f) {
  GridFn out(g);
  for (std::size_t i = 0; i < g->size(); ++i) out[i] = f(g->node(i));
  return out;
}

CGridFn sample_c(const GridPtr& g, const std::function<std::complex<double>(double)>& f) {
  CGridFn out(g);
  for (std::size_t i = 0; i < g->size(); ++i) out[i] = f(g->node(i));
  return out;
}

GridFn mul(const GridFn& a, const GridFn& b) {
  check_same(a.grid, b.grid);
  GridFn out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double inner(const GridFn& f, const GridFn& g) {
  check_same(f.grid, g.grid);
  const auto& w = f.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * g[i];
  return s;
}

std::complex<double> inner(const CGridFn& f, const CGridFn& g) {
  check_same(f.grid, g.grid);
  const auto& w = f.grid->weights();
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * std::conj(g[i]);
  return s;
}

double integrate(const GridFn& f) {
  const auto& w = f.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

std::complex<double> integrate(const CGridFn& f) {
  const auto& w = f.grid->weights();
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

double l2_norm(const GridFn& f) { return std::sqrt(inner(f, f)); }

double max_abs(const GridFn& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

GridFn reflect(const GridFn& f) {
  if (!f.grid->symmetric()) throw std::invalid_argument("reflect needs a symmetric grid");
  const auto& mir = f.grid->mirror();
  GridFn out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[mir[i]];
  return out;
}

GridFn parity_project(const GridFn& f, Parity p) {
  const GridFn r = reflect(f);
  GridFn out(f.grid);
  const double s = (p == Parity::even) ? 1.0 : -1.0;
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = 0.5 * (f[i] + s * r[i]);
  return out;
}

GridFn differentiate(const GridFn& f, int k) {
  const Grid& g = *f.grid;
  const Eigen::MatrixXd& D = g.ref_diff(k);
  const int m = g.nodes_per_panel();
  GridFn out(f.grid);
  for (int p = 0; p < g.panel_count(); ++p) {
    const double scale = std::pow(2.0 / (g.edges()[p + 1] - g.edges()[p]), k);
    Eigen::Map<const Eigen::VectorXd> v(f.values.data() + static_cast<std::size_t>(p) * m, m);
    Eigen::Map<Eigen::VectorXd> o(out.values.data() + static_cast<std::size_t>(p) * m, m);
    o = scale * (D * v);
  }
  return out;
}

double eval_at(const GridFn& f, double x, int k) {
  const Grid& g = *f.grid;
  const int p = g.panel_of(x);
  const int m = g.nodes_per_panel();
  const auto row = g.lagrange_row(p, x);
  Eigen::Map<const Eigen::VectorXd> v(f.values.data() + static_cast<std::size_t>(p) * m, m);
  Eigen::VectorXd d = v;
  if (k > 0) d = std::pow(2.0 / (g.edges()[p + 1] - g.edges()[p]), k) * (g.ref_diff(k) * v);
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += row[j] * d[j];
  return s;
}

GridFn resample(const GridFn& f, const GridPtr& target) {
  GridFn out(target);
  for (std::size_t i = 0; i < target->size(); ++i) out[i] = eval_at(f, target->node(i));
  return out;
}

std::string to_csv(const GridFn& f) {
  std::ostringstream os;
  os << "# grid=" << std::hex << f.grid->hash() << std::dec << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) os << f.x(i) << "," << f[i] << "\n";
  return os.str();
}

namespace {

std::vector<std::pair<double, double>> parse_pairs(const std::string& text, std::string* header) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::pair<double, double>> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) *header = line;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("csv line without comma: " + line);
    try {
      pts.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      if (pts.empty()) continue;  // column titles
      throw std::invalid_argument("bad csv line: " + line);
    }
  }
  return pts;
}

}  // namespace

GridFn from_csv(const std::string& text, const GridPtr& g) {
  std::string header;
  const auto pts = parse_pairs(text, &header);
  std::ostringstream want;
  want << "# grid=" << std::hex << g->hash();
  if (header != want.str() || pts.size() != g->size())
    throw std::invalid_argument("csv does not belong to this grid");
  GridFn out(g);
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = pts[i].second;
  return out;
}

GridFn from_csv_points(const std::string& text, const GridPtr& g) {
  auto pts = parse_pairs(text, nullptr);
  if (pts.size() < 2) throw std::invalid_argument("need at least two csv points");
  std::sort(pts.begin(), pts.end());
  GridFn out(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i);
    auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(x, -HUGE_VAL));
    if (it == pts.begin()) { out[i] = pts.front().second; continue; }
    if (it == pts.end()) { out[i] = pts.back().second; continue; }
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    out[i] = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
  return out;
}

}  // namespace ispec
