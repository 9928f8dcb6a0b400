#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "selfsim/jacobi.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/quadrature.hpp"
#include "selfsim/real.hpp"

namespace selfsim {

struct SpectrumSource {
  std::string measure_digest;
  std::string kernel_digest;
  int depth = 0;
};

// Eigenvalues of the weighted kernel matrix, descending, positive only.
// Values at or below trust_threshold are kept (they are needed for tail
// bookkeeping) but are not reliable: the threshold is the symmetric
// perturbation bound for the measure mass dropped by truncation.
struct Spectrum {
  std::vector<Real> eigenvalues;
  unsigned precision_bits = 0;
  SpectrumSource source;
  Real trust_threshold;
  Real tail_mass;

  size_t trusted_count() const {
    size_t c = 0;
    while (c < eigenvalues.size() && eigenvalues[c] > trust_threshold) ++c;
    return c;
  }
};

// max_t G(t,t), scanned on a dense grid. Feeds the trust threshold; the
// safety factor there absorbs the scan granularity.
inline double kernel_max_diag(const KernelSpec& k) {
  const int grid = 256;
  double best = 0;
  QuadOptions opt;
  opt.check = false;
  for (int i = 0; i <= grid; ++i) {
    double t = static_cast<double>(i) / grid;
    best = std::max(best, covariance<double>(k, t, t, opt));
  }
  return best;
}

// Entry (i,j) = sqrt(w_i w_j) G(t_i, t_j), evaluated at working precision
// and rounded to exactly precision_bits. For atomic measures this matrix
// carries exactly the nonzero spectrum of the integral operator.
inline SymMatrix<Real> gram_matrix(const AtomList& atoms, const KernelSpec& k,
                                   unsigned precision_bits) {
  if (atoms.atoms.empty()) throw domain_error("gram_matrix: no atoms");
  PrecisionScope scope(precision_bits);
  const int n = static_cast<int>(atoms.atoms.size());
  std::vector<Real> loc(n), sqw(n);
  for (int i = 0; i < n; ++i) {
    loc[i] = to_real(atoms.atoms[i].location);
    sqw[i] = sqrt(to_real(atoms.atoms[i].weight));
  }
  SymMatrix<Real> g(n, precision_bits);
  QuadOptions opt;  // closed-form kernels ignore this
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Real v = sqw[i] * sqw[j] * covariance<Real>(k, loc[i], loc[j], opt);
      round_to_bits(v, precision_bits);
      g.at(i, j) = v;
    }
  }
  return g;
}

// Raw solver surface: all eigenvalues of a symmetric matrix, descending.
inline std::vector<Real> sym_eigenvalues(const SymMatrix<Real>& m, JacobiOptions opt = {}) {
  return jacobi_eigenvalues(m, opt).eigenvalues;
}

// Full reduction: atoms -> gram -> Jacobi -> trust bookkeeping.
inline Spectrum compute_spectrum(const AtomList& atoms, const KernelSpec& k,
                                 unsigned precision_bits, SpectrumSource source = {}) {
  PrecisionScope scope(precision_bits);
  SymMatrix<Real> g = gram_matrix(atoms, k, precision_bits);
  std::vector<Real> ev = sym_eigenvalues(g);

  Spectrum sp;
  sp.precision_bits = precision_bits;
  sp.source = source;
  sp.source.depth = atoms.depth;
  sp.tail_mass = to_real(atoms.tail_mass);
  sp.trust_threshold = 4 * sp.tail_mass * Real(kernel_max_diag(k));
  for (auto& v : ev) {
    if (!(v > 0)) continue;  // roundoff negatives sit far below the trust floor
    if (!sp.eigenvalues.empty() && v == sp.eigenvalues.back()) continue;  // exact duplicate
    sp.eigenvalues.push_back(v);
  }
  return sp;
}

// N(lambda) = #{j : lambda_j > lambda}. Counting below the trust threshold
// would count truncation noise, so that region is refused.
inline int counting_function(const Spectrum& sp, const Real& lambda) {
  if (!(lambda > 0)) throw domain_error("counting_function: lambda must be positive");
  if (lambda < sp.trust_threshold)
    throw domain_error("counting_function: lambda below the trusted range");
  int c = 0;
  for (const auto& v : sp.eigenvalues) {
    if (v > lambda) ++c;
    else break;
  }
  return c;
}

struct SlopeTheory {
  double slope;  // (n-1)/ln q
  double q;      // 1/(rho a_m^(2l-1))
};

inline SlopeTheory theoretical_slope(const MeasureSpec& spec, int ell) {
  auto rep = validate(spec);
  if (!rep.valid) throw domain_error("theoretical_slope: invalid measure spec");
  if (ell < 1) throw domain_error("theoretical_slope: ell must be >= 1");
  Rational qr = Rational(1) / (spec.rho() * rational_pow(spec.a(spec.m), 2 * ell - 1));
  double q = static_cast<double>(qr);
  if (!(q > 1)) throw domain_error("theoretical_slope: q <= 1 for a valid spec is impossible");
  return {(spec.n() - 1) / std::log(q), q};
}

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
  double window_hi = 0, window_lo = 0;
  int points_used = 0;
  std::vector<double> residuals;
};

inline std::pair<double, double> default_window(const Spectrum& sp) {
  if (sp.eigenvalues.empty()) throw domain_error("default_window: empty spectrum");
  double hi = static_cast<double>(sp.eigenvalues.front()) * 1e-3;
  double lo = static_cast<double>(sp.trust_threshold) * 1e3;
  return {hi, lo};
}

// Least squares of N(lambda_j) = j against ln(1/lambda_j) inside the window.
inline SlopeFit fit_counting_slope(const Spectrum& sp, double lam_hi, double lam_lo) {
  if (!(lam_lo > 0) || !(lam_hi > lam_lo))
    throw domain_error("fit_counting_slope: bad window");
  if (Real(lam_lo) < sp.trust_threshold)
    throw domain_error("fit_counting_slope: window extends below the trusted range");
  std::vector<std::pair<double, double>> pts;  // (ln(1/lambda), j)
  for (size_t j = 0; j < sp.eigenvalues.size(); ++j) {
    const Real& lam = sp.eigenvalues[j];
    if (lam < lam_hi && lam > lam_lo)
      pts.emplace_back(-static_cast<double>(log(lam)), static_cast<double>(j + 1));
  }
  if (pts.size() < 5) throw domain_error("fit_counting_slope: fewer than 5 points in window");

  double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (den <= 0) throw domain_error("fit_counting_slope: degenerate regression");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0;
  for (auto& [x, y] : pts) {
    double r = y - fit.slope * x - fit.intercept;
    fit.residuals.push_back(r);
    rss += r * r;
  }
  fit.stderr_slope = pts.size() > 2 ? std::sqrt(rss / (n - 2) / (sxx - sx * sx / n)) : 0.0;
  fit.window_hi = lam_hi;
  fit.window_lo = lam_lo;
  fit.points_used = static_cast<int>(pts.size());
  return fit;
}

inline SlopeFit fit_counting_slope(const Spectrum& sp) {
  auto [hi, lo] = default_window(sp);
  return fit_counting_slope(sp, hi, lo);
}

// Ratio of fitted slopes on a shared window; the compact-perturbation
// invariance predicts 1 for kernels differing by lower-order terms.
inline double compare_asymptotics(const Spectrum& sp1, const Spectrum& sp2, double lam_hi,
                                  double lam_lo) {
  return fit_counting_slope(sp1, lam_hi, lam_lo).slope /
         fit_counting_slope(sp2, lam_hi, lam_lo).slope;
}

inline double compare_asymptotics(const Spectrum& sp1, const Spectrum& sp2) {
  auto [h1, l1] = default_window(sp1);
  auto [h2, l2] = default_window(sp2);
  return compare_asymptotics(sp1, sp2, std::min(h1, h2), std::max(l1, l2));
}

}  // namespace selfsim
