// Composite Gauss-Legendre grids on (0,1) and functions sampled on them.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ispec {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  // Symmetric grid on (0,1); panel edges follow x = 2u^2 on [0,1/2] and are
  // mirrored on [1/2,1]. `panels` must be even. The two end panels are further
  // split geometrically (ratio 2) `end_levels` times.
  static GridPtr standard(int panels = 64, int m = 12, int end_levels = kDefaultEndLevels);
  static constexpr int kDefaultEndLevels = 8;
  // Default grid, honouring the ISPEC_GRID_PANELS environment variable.
  static GridPtr from_env();
  // Uniform panels on [a,b].
  static GridPtr uniform(double a, double b, int panels, int m);
  // Arbitrary increasing panel edges.
  static GridPtr from_edges(std::vector<double> edges, int m);

  std::size_t size() const { return nodes_.size(); }
  int nodes_per_panel() const { return m_; }
  int panel_count() const { return static_cast<int>(edges_.size()) - 1; }
  double lower() const { return edges_.front(); }
  double upper() const { return edges_.back(); }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& edges() const { return edges_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Panel containing x, clamped to the valid range.
  int panel_of(double x) const;
  // Index of the mirror node under x -> 1-x; empty for asymmetric grids.
  const std::vector<std::size_t>& mirror() const { return mirror_; }
  bool symmetric() const { return !mirror_.empty(); }
  std::uint64_t hash() const { return hash_; }

  // Reference Gauss-Legendre rule on [-1,1].
  const std::vector<double>& ref_nodes() const { return ref_x_; }
  const std::vector<double>& ref_weights() const { return ref_w_; }
  const std::vector<double>& bary_weights() const { return bary_; }
  // k-th derivative matrix on the reference panel.
  const Eigen::MatrixXd& ref_diff(int k) const;

  // Lagrange basis values of panel p at x (length m).
  std::vector<double> lagrange_row(int p, double x) const;

 private:
  Grid(std::vector<double> edges, int m);

  int m_;
  std::vector<double> edges_, nodes_, weights_;
  std::vector<double> ref_x_, ref_w_, bary_;
  std::vector<Eigen::MatrixXd> ref_diff_;
  std::vector<std::size_t> mirror_;
  std::uint64_t hash_ = 0;
};

template <class T>
struct GridFnT {
  GridPtr grid;
  std::vector<T> values;

  GridFnT() = default;
  GridFnT(GridPtr g, std::vector<T> v);
  explicit GridFnT(GridPtr g) : grid(std::move(g)), values(grid->size(), T(0)) {}

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
  double x(std::size_t i) const { return grid->node(i); }

  GridFnT& operator+=(const GridFnT& o);
  GridFnT& operator-=(const GridFnT& o);
  GridFnT& operator*=(T s);
};

using GridFn = GridFnT<double>;
using CGridFn = GridFnT<std::complex<double>>;

template <class T> GridFnT<T> operator+(GridFnT<T> a, const GridFnT<T>& b) { return a += b; }
template <class T> GridFnT<T> operator-(GridFnT<T> a, const GridFnT<T>& b) { return a -= b; }
template <class T> GridFnT<T> operator*(T s, GridFnT<T> a) { return a *= s; }

GridFn sample(const GridPtr& g, const std::function<double(double)>& f);
CGridFn sample_c(const GridPtr& g, const std::function<std::complex<double>(double)>& f);
// Pointwise product.
GridFn mul(const GridFn& a, const GridFn& b);

double inner(const GridFn& f, const GridFn& g);
std::complex<double> inner(const CGridFn& f, const CGridFn& g);
double integrate(const GridFn& f);
std::complex<double> integrate(const CGridFn& f);
double l2_norm(const GridFn& f);
double max_abs(const GridFn& f);

GridFn reflect(const GridFn& f);
enum class Parity { even, odd };
GridFn parity_project(const GridFn& f, Parity p);

GridFn differentiate(const GridFn& f, int k);
// k-th derivative of the panel interpolant at an arbitrary point (k = 0 interpolates).
double eval_at(const GridFn& f, double x, int k = 0);
GridFn resample(const GridFn& f, const GridPtr& target);

std::string to_csv(const GridFn& f);
GridFn from_csv(const std::string& text, const GridPtr& g);
// Two-column (node,value) data interpolated piecewise linearly onto g.
GridFn from_csv_points(const std::string& text, const GridPtr& g);

}  // namespace ispec
