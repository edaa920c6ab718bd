#pragma once

#include "fbkpp/types.hpp"

namespace fbkpp {

/// Thomas algorithm, in place on rhs.  No pivoting; the implicit diffusion
/// matrices used here are strictly diagonally dominant.
template <typename Scalar>
void solve_tridiagonal(const Vector<Scalar>& sub, const Vector<Scalar>& diag, const Vector<Scalar>& sup,
                       Vector<Scalar>& rhs, Vector<Scalar>& scratch) {
  const Eigen::Index n = diag.size();
  scratch.resize(n);
  Scalar beta = diag[0];
  rhs[0] /= beta;
  for (Eigen::Index i = 1; i < n; ++i) {
    scratch[i] = sup[i - 1] / beta;
    beta = diag[i] - sub[i - 1] * scratch[i];
    rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / beta;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

/// y = T v for a tridiagonal T stored as (sub, diag, sup).
template <typename Scalar>
void apply_tridiagonal(const Vector<Scalar>& sub, const Vector<Scalar>& diag, const Vector<Scalar>& sup,
                       const Vector<Scalar>& v, Vector<Scalar>& y) {
  const Eigen::Index n = diag.size();
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = diag[i] * v[i];
    if (i > 0) acc += sub[i - 1] * v[i - 1];
    if (i + 1 < n) acc += sup[i] * v[i + 1];
    y[i] = acc;
  }
}

}  // namespace fbkpp
