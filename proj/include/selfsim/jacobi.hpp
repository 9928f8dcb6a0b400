#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/matrix.hpp"

namespace selfsim {

struct JacobiOptions {
  int max_sweeps = 50;
  // Convergence: off-diagonal Frobenius mass < 2^-(threshold_bits - 8) * ||A||_F.
  // 0 means "use the matrix's own precision_bits".
  unsigned threshold_bits = 0;
};

template <class T>
struct JacobiResult {
  std::vector<T> eigenvalues;  // descending
  int sweeps = 0;
  T off_residual{};  // final off-diagonal Frobenius norm
};

// Cyclic Jacobi for symmetric matrices. Plain rotations carried in the
// scalar type, which is the whole point: at mpfr precision this stays
// backward stable across ~45 decades of eigenvalue range, and the matrices
// here never exceed a few hundred rows.
template <class T>
JacobiResult<T> jacobi_eigenvalues(const SymMatrix<T>& m, JacobiOptions opt = {}) {
  using std::abs;
  using std::sqrt;
  const int n = m.order();
  JacobiResult<T> res;
  if (n == 0) return res;

  std::vector<T> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = m(i, j);
  auto A = [&](int i, int j) -> T& { return a[static_cast<size_t>(i) * n + j]; };

  T frob(0);
  for (const auto& v : a) frob += v * v;
  frob = sqrt(frob);

  unsigned bits = opt.threshold_bits ? opt.threshold_bits : m.precision_bits();
  T tol = frob;
  for (unsigned i = 0; i + 8 < bits; ++i) tol /= 2;

  auto off_norm = [&]() {
    T s(0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
    return sqrt(2 * s);
  };

  T off = off_norm();
  int sweep = 0;
  while (off > tol && frob > 0) {
    if (sweep++ >= opt.max_sweeps)
      throw convergence_error("jacobi: sweep budget exhausted", static_cast<double>(off / frob));
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        T apq = A(p, q);
        if (apq == 0) continue;
        T theta = (A(q, q) - A(p, p)) / (2 * apq);
        T t;
        if (theta == 0) {
          t = 1;
        } else {
          t = 1 / (abs(theta) + sqrt(1 + theta * theta));
          if (theta < 0) t = -t;
        }
        T c = 1 / sqrt(1 + t * t);
        T s = t * c;
        T tau = s / (1 + c);
        T h = t * apq;
        A(p, p) -= h;
        A(q, q) += h;
        A(p, q) = A(q, p) = T(0);
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          T aip = A(i, p), aiq = A(i, q);
          A(i, p) = A(p, i) = aip - s * (aiq + tau * aip);
          A(i, q) = A(q, i) = aiq + s * (aip - tau * aiq);
        }
      }
    }
    off = off_norm();
  }

  res.sweeps = sweep;
  res.off_residual = off;
  res.eigenvalues.reserve(n);
  for (int i = 0; i < n; ++i) res.eigenvalues.push_back(A(i, i));
  std::sort(res.eigenvalues.begin(), res.eigenvalues.end(), std::greater<T>());
  return res;
}

}  // namespace selfsim
