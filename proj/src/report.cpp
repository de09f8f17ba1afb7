#include "ispec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ispec/spectral.hpp"
#include "ispec/xform.hpp"

namespace ispec {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

GridFn random_smooth(const GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), k = 1 + 3 * std::abs(u(rng));
  return sample(g, [=](double t) { return a + b * t + c * std::cos(k * t) + d * std::sin(2.7 * t * t); });
}

}  // namespace

// ---- checks ----------------------------------------------------------------

void CheckSet::add(std::string name, double value, double tol) { items_.push_back({std::move(name), value, tol}); }

void CheckSet::worst(const std::string& name, double value, double tol) {
  for (auto& c : items_)
    if (c.name == name) {
      if (!(value <= c.value)) c.value = value;
      return;
    }
  add(name, value, tol);
}

bool CheckSet::all_pass() const {
  return std::all_of(items_.begin(), items_.end(), [](const Check& c) { return c.pass(); });
}

std::string CheckSet::to_csv() const {
  std::string s = "name,value,tol,pass\n";
  for (const auto& c : items_) s += c.name + "," + num(c.value) + "," + num(c.tol) + "," + (c.pass() ? "1" : "0") + "\n";
  return s;
}

std::string CheckSet::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : items_) {
    nlohmann::json e{{"name", c.name}, {"tol", c.tol}, {"pass", c.pass()}};
    if (std::isfinite(c.value))
      e["value"] = c.value;
    else
      e["value"] = nullptr;
    j.push_back(e);
  }
  return j.dump(2);
}

// ---- writers ---------------------------------------------------------------

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + num(r[i]);
    s += "\n";
  }
  return s;
}

std::string svg_plot(const std::vector<Series>& series, const PlotOptions& opt) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  const double W = opt.width, H = opt.height, L = 70, R = 20, T = 30, B = 45;
  auto ty = [&](double y) { return opt.log_y ? std::log10(std::max(std::abs(y), 1e-300)) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(ty(s.y[i]))) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(opt.title)
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  const std::string ylo = opt.log_y ? "1e" + num(y0) : num(y0), yhi = opt.log_y ? "1e" + num(y1) : num(y1);
  o << "<text x=\"" << L << "\" y=\"" << H - B + 15 << "\" font-size=\"11\">" << num(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 15 << "\" font-size=\"11\" text-anchor=\"end\">" << num(x1)
    << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << ylo << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">" << yhi << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape_xml(opt.xlabel) << "</text>\n";
  o << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\">" << escape_xml(opt.ylabel) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(ty(s.y[i]))) continue;
      o << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
      << col << "\">" << escape_xml(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

// ---- suites ----------------------------------------------------------------

CheckSet ops_suite(const GridPtr& g, unsigned seed) {
  CheckSet cs;
  std::mt19937 rng(seed);
  for (int l = 1; l <= 4; ++l) {
    const auto x2l = sample(g, [l](double x) { return std::pow(x, 2 * l); });
    for (int k = 0; k < 50; ++k) {
      const auto f = random_smooth(g, rng), h = random_smooth(g, rng);
      cs.worst("adjointness", std::abs(inner(apply_S(l, f), h) - inner(f, apply_S_adj(l, h))), 1e-10);
      if (k < 10) cs.worst("range_orthogonality", std::abs(inner(x2l, apply_S(l, f))), 1e-10);
    }
  }
  for (int l = 1; l <= 3; ++l)
    for (int m = l + 1; m <= 3; ++m) {
      const auto f = random_smooth(g, rng);
      cs.worst("commutation", l2_norm(apply_S(l, apply_S(m, f)) - apply_S(m, apply_S(l, f))), 1e-9);
    }
  for (int l = 1; l <= 4; ++l)
    for (int k = 1; k <= l; ++k) {
      const auto f = sample(g, [k](double x) { return std::pow(x, 2 * k); });
      cs.worst("kernel_T_adj", l2_norm(apply({OpFamily::T_adj, l}, f)), 1e-9);
    }
  for (double z : {1.0, 5.0, bessel_zero({1}, 3)})
    for (int l = 1; l <= 3; ++l) {
      const auto phi = sample(g, [&](double x) { return phi_psi(l, z * x).phi; });
      const auto phim = sample(g, [&](double x) { return phi_psi(l - 1, z * x).phi; });
      cs.worst("index_reduction", max_abs(phi + apply_S_adj(l, phim)), 1e-9);
    }
  for (int l = 1; l <= 3; ++l)
    for (double z : {2.0, 7.3}) {
      const auto zeta = random_smooth(g, rng);
      const auto tz = apply({OpFamily::T, l}, zeta);
      const auto lhs1 = sample(g, [&](double x) { return 2 * phi_psi(l, z * x).phi - 1; });
      const auto c2 = sample(g, [&](double x) { return std::cos(2 * z * x); });
      const auto psi = sample(g, [&](double x) { return phi_psi(l, z * x).psi; });
      const auto s2 = sample(g, [&](double x) { return std::sin(2 * z * x); });
      cs.worst("trig_transfer", std::abs(inner(lhs1, zeta) - inner(c2, tz)), 1e-9);
      cs.worst("trig_transfer", std::abs(inner(psi, zeta) + 0.5 * inner(s2, tz)), 1e-9);
    }
  for (int l = 1; l <= 3; ++l) {
    const auto f = random_smooth(g, rng);
    cs.worst("B_inverse", l2_norm(apply({OpFamily::B, l}, apply({OpFamily::T, l}, f)) - f), 1e-8);
  }
  return cs;
}

CheckSet ks_sweep(int queries, unsigned seed, std::vector<KSQuery>* used) {
  CheckSet cs;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  int done = 0;
  while (done < queries) {
    double x = u(rng), X = u(rng);
    if (x > X) std::swap(x, X);
    const KSQuery q{{done % 3}, x, X, 0.3 + 10 * u(rng), 400};
    KSValue v;
    try {
      v = ks_evaluate(q);
    } catch (const std::domain_error&) {
      continue;  // z next to a zero
    }
    cs.worst("ks_residual", v.residual, 1e-7);
    if (q.order.ell == 0) cs.worst("ks_half_closed_form", std::abs(v.rhs - ks_half_closed_form(x, X, q.z)), 1e-10);
    if (used) used->push_back(q);
    ++done;
  }
  return cs;
}

CheckSet frechet_suite(const GridPtr& g, int cases, unsigned seed) {
  CheckSet cs;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  const double eps = 1e-5;
  for (int c = 0; c < cases; ++c) {
    const int l = c % 3, n = 1 + c % 6;
    const double a = 0.5 * u(rng);
    const Potential q = Potential::from_fn(g, [a](double x) { return a * std::sin(2 * x + 1); });
    const double b = u(rng), d = u(rng), e = u(rng), k = 1 + 4 * std::abs(u(rng));
    const auto z = sample(g, [=](double x) { return 1.0 + b * x + d * std::cos(k * x) + e * x * x * x; });
    const double an = frechet_derivative({l}, n, q, z);
    const double lp = dirichlet_spectrum({l}, q + eps * z, n).eigenvalues.back();
    const double lm = dirichlet_spectrum({l}, q + (-eps) * z, n).eigenvalues.back();
    cs.worst("frechet_relative", std::abs((lp - lm) / (2 * eps) - an) / std::abs(an), 1e-4);
  }
  return cs;
}

}  // namespace ispec
