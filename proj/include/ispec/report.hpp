// Report writers (CSV, JSON, SVG polylines) and the named check suites shared
// by the command-line tool and the acceptance run.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ispec/funcspace.hpp"
#include "ispec/ksgreen.hpp"

namespace ispec {

struct Check {
  std::string name;
  double value = 0.0;  // worst observed error
  double tol = 0.0;
  bool pass() const { return value <= tol; }  // NaN fails
};

class CheckSet {
 public:
  void add(std::string name, double value, double tol);
  // Keeps the largest value seen under `name`.
  void worst(const std::string& name, double value, double tol);
  bool all_pass() const;
  const std::vector<Check>& items() const { return items_; }
  std::string to_csv() const;   // name,value,tol,pass
  std::string to_json() const;

 private:
  std::vector<Check> items_;
};

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotOptions {
  std::string title, xlabel, ylabel;
  bool log_y = false;
  int width = 640, height = 400;
};

// Self-contained SVG with one polyline per series, axes and min/max ticks.
std::string svg_plot(const std::vector<Series>& series, const PlotOptions& opt);

// Creates parent directories; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

// Transformation-operator identities for l <= 4 (adjointness, range
// orthogonality, commutation, kernel of T_l*, index reduction, trigonometric
// transfer, B_l inverse).
CheckSet ops_suite(const GridPtr& g, unsigned seed = 21);

// Compensated KS residuals over `queries` random (x, X, z) for nu = 1/2, 3/2, 5/2,
// plus the nu = 1/2 closed form. The queries used are appended to `used`.
CheckSet ks_sweep(int queries = 30, unsigned seed = 8, std::vector<KSQuery>* used = nullptr);

// Analytic against central-difference eigenvalue derivatives.
CheckSet frechet_suite(const GridPtr& g, int cases = 20, unsigned seed = 17);

}  // namespace ispec
