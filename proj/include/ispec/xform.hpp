// Index-reduction operators S_l, their adjoints and inverses, and the
// compositions T_l, T_l*, B_l.
#pragma once

#include "ispec/funcspace.hpp"

namespace ispec {

enum class OpFamily { S, S_adj, InvA, T, T_adj, B, T2_explicit };

struct OpTag {
  OpFamily family;
  int ell;
};

inline constexpr int kMaxOpEll = 8;

// Pointwise (at grid nodes) values of  int_x^1 t^p f(t) dt  and  int_0^x t^p f(t) dt.
GridFn right_integral(const GridFn& f, double p);
GridFn left_integral(const GridFn& f, double p);
// int_a^b t^p f(t) dt for arbitrary a < b inside the grid.
double interval_integral(const GridFn& f, double p, double a, double b);

GridFn apply_S(int ell, const GridFn& f);
GridFn apply_S_adj(int ell, const GridFn& f);
GridFn apply_invA(int ell, const GridFn& f);
GridFn apply(OpTag tag, const GridFn& f);

// T_2 written out: -z - 12 x int_x^1 z/t^2 + 24 x^3 int_x^1 z/t^4.
GridFn t2_explicit(const GridFn& zeta);

// Sup-norm residual of  f^(2l) + (4l/x) f^(2l-1) - g^(2l)  with g = S_l f.
double ode_residual_S(int ell, const GridFn& f);
// Sup-norm residual of  g^(2l+1) + (4l/x) g^(2l) - f^(2l+1)  with g = S_l* f.
double ode_residual_Sadj(int ell, const GridFn& f);

}  // namespace ispec
