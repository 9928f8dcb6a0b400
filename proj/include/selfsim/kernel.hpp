#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

// Catalog of base Gaussian processes on [0,1]. `matern` and
// `bridged_integrated_wiener` carry their order in `integrations` and are
// evaluated directly; all others admit s-fold integration with per-step
// endpoints in {0,1}.
enum class Process {
  wiener,
  brownian_bridge,
  centered_wiener,
  centered_bridge,
  elongated_bridge,
  slepian,
  ou_stationary,
  ou_zero,
  bogolyubov,
  bridged_integrated_wiener,
  matern,
};

inline const char* process_name(Process p) {
  switch (p) {
    case Process::wiener: return "wiener";
    case Process::brownian_bridge: return "brownian_bridge";
    case Process::centered_wiener: return "centered_wiener";
    case Process::centered_bridge: return "centered_bridge";
    case Process::elongated_bridge: return "elongated_bridge";
    case Process::slepian: return "slepian";
    case Process::ou_stationary: return "ou_stationary";
    case Process::ou_zero: return "ou_zero";
    case Process::bogolyubov: return "bogolyubov";
    case Process::bridged_integrated_wiener: return "bridged_integrated_wiener";
    case Process::matern: return "matern";
  }
  return "?";
}

inline Process process_from_string(const std::string& s) {
  for (Process p : {Process::wiener, Process::brownian_bridge, Process::centered_wiener,
                    Process::centered_bridge, Process::elongated_bridge, Process::slepian,
                    Process::ou_stationary, Process::ou_zero, Process::bogolyubov,
                    Process::bridged_integrated_wiener, Process::matern})
    if (s == process_name(p)) return p;
  throw spec_error("unknown process '" + s + "'");
}

inline bool takes_param(Process p) {
  return p == Process::elongated_bridge || p == Process::slepian || p == Process::ou_stationary ||
         p == Process::ou_zero || p == Process::bogolyubov;
}

// These two store their order in `integrations` and take no endpoint list.
inline bool order_only(Process p) {
  return p == Process::matern || p == Process::bridged_integrated_wiener;
}

struct KernelSpec {
  Process process = Process::wiener;
  std::optional<double> param;
  int integrations = 0;
  std::vector<int> endpoints;  // integration endpoints, one bit per step

  void check() const {
    if (integrations < 0) throw spec_error("integrations must be >= 0");
    if (takes_param(process)) {
      if (!param) throw spec_error(std::string(process_name(process)) + " requires a parameter");
      double a = *param;
      switch (process) {
        case Process::ou_stationary:
        case Process::bogolyubov:
          if (!(a > 0)) throw spec_error("alpha must be > 0");
          break;
        case Process::ou_zero:
          if (a == 0) throw spec_error("alpha must be nonzero");
          break;
        case Process::elongated_bridge:
          if (!(a < 1)) throw spec_error("elongated bridge requires u < 1");
          break;
        case Process::slepian:
          if (!(a >= 1)) throw spec_error("slepian requires c >= 1");
          break;
        default: break;
      }
    } else if (param) {
      throw spec_error(std::string(process_name(process)) + " takes no parameter");
    }
    if (order_only(process)) {
      if (!endpoints.empty())
        throw spec_error(std::string(process_name(process)) + " takes no endpoints");
    } else {
      if (static_cast<int>(endpoints.size()) != integrations)
        throw spec_error("endpoints length must equal integrations");
      for (int b : endpoints)
        if (b != 0 && b != 1) throw spec_error("endpoints must be 0 or 1");
    }
    if ((process == Process::centered_wiener || process == Process::centered_bridge) &&
        integrations > 2)
      throw spec_error("centered-integrated processes are supported for s <= 2 only");
  }
};

// Half-order of the differential operator whose Green function the
// covariance is; drives q = 1/(d_m a_m^(2l-1)).
inline int operator_order(const KernelSpec& k) {
  k.check();
  return 1 + k.integrations;
}

// ---- scalar helpers usable with double and Real ----

template <class T>
T tmin(const T& a, const T& b) {
  return a < b ? a : b;
}

template <class T>
T ipow(const T& x, int n) {
  T r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

inline unsigned long long binom_ull(int n, int k) {
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) / i;
  return r;
}

inline unsigned long long factorial_ull(int n) {
  unsigned long long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// E W_a(s) W_b(u) for zero-endpoint iterated integrals of the Wiener process:
//   int_0^{min(s,u)} (s-v)^a (u-v)^b dv / (a! b!),
// expanded binomially so it evaluates exactly at any precision.
template <class T>
T iw_cross(int a, int b, const T& s, const T& u) {
  T m = tmin(s, u);
  T sum(0);
  for (int i = 0; i <= a; ++i) {
    for (int j = 0; j <= b; ++j) {
      T term = T(binom_ull(a, i) * binom_ull(b, j)) * ipow(s, a - i) * ipow(u, b - j) *
               ipow(m, i + j + 1) / T(i + j + 1);
      if ((i + j) % 2) sum -= term;
      else sum += term;
    }
  }
  return sum / T(factorial_ull(a) * factorial_ull(b));
}

template <class T>
T matern_covariance(int order_s, const T& dist) {
  using std::exp;
  T sum(0);
  for (int k = 0; k <= order_s; ++k) {
    unsigned long long c =
        factorial_ull(order_s + k) / (factorial_ull(k) * factorial_ull(order_s - k));
    sum += T(c) * ipow(2 * dist, order_s - k);
  }
  return exp(-dist) * sum / T((1ull << (2 * order_s + 1)) * factorial_ull(order_s));
}

// Dense linear solve with partial pivoting; A is n x n row-major. Used for
// the handful-sized conditioning systems only.
template <class T>
std::vector<T> solve_dense(std::vector<T> A, std::vector<T> b, int n) {
  using std::abs;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (abs(A[r * n + col]) > abs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0) throw domain_error("singular conditioning matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      T f = A[r * n + col] / A[col * n + col];
      for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<T> x(n);
  for (int r = n - 1; r >= 0; --r) {
    T s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * x[c];
    x[r] = s / A[r * n + r];
  }
  return x;
}

// Covariance of (W_s(t) | W_j(1) = 0, 0 <= j <= s): Gaussian conditioning of
// the integrated-Wiener covariance on the s+1 linear constraints.
template <class T>
T bridged_integrated_wiener_cov(int s_count, const T& s, const T& t) {
  int n = s_count + 1;
  std::vector<T> sigma(n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) sigma[j * n + k] = iw_cross(j, k, T(1), T(1));
  std::vector<T> cs(n), ct(n);
  for (int j = 0; j < n; ++j) {
    cs[j] = iw_cross(s_count, j, s, T(1));
    ct[j] = iw_cross(s_count, j, t, T(1));
  }
  std::vector<T> x = solve_dense(sigma, ct, n);
  T corr(0);
  for (int j = 0; j < n; ++j) corr += cs[j] * x[j];
  return iw_cross(s_count, s_count, s, t) - corr;
}

// Closed-form covariance of the base (pre-integration) process. For matern
// and bridged_integrated_wiener this already is the full covariance.
template <class T>
T base_covariance(const KernelSpec& k, const T& s, const T& t) {
  using std::abs;
  using std::cosh;
  using std::exp;
  using std::sinh;
  switch (k.process) {
    case Process::wiener:
      return tmin(s, t);
    case Process::brownian_bridge:
      return tmin(s, t) - s * t;
    case Process::centered_wiener:
      return tmin(s, t) - s + s * s / 2 - t + t * t / 2 + T(1) / 3;
    case Process::centered_bridge:
      return tmin(s, t) - s * t - (s - s * s) / 2 - (t - t * t) / 2 + T(1) / 12;
    case Process::elongated_bridge: {
      T u = T(*k.param);
      return tmin(s, t) - (2 * u - u * u) * s * t;
    }
    case Process::slepian:
      return T(*k.param) - abs(t - s);
    case Process::ou_stationary: {
      T a = T(*k.param);
      return exp(-a * abs(s - t)) / (2 * a);
    }
    case Process::ou_zero: {
      T a = T(*k.param);
      return (exp(-a * abs(s - t)) - exp(-a * (s + t))) / (2 * a);
    }
    case Process::bogolyubov: {
      // (e^{a|s-t|} + e^{a-a|s-t|}) / (2a (e^a - 1)), in hyperbolic form
      T a = T(*k.param);
      return cosh(a * (abs(s - t) - T(1) / 2)) / (2 * a * sinh(a / 2));
    }
    case Process::matern:
      return matern_covariance(k.integrations, T(abs(s - t)));
    case Process::bridged_integrated_wiener:
      return bridged_integrated_wiener_cov(k.integrations, s, t);
  }
  throw spec_error("unhandled process");
}

// G_X(s,t) for integrations == 0 (plus the order-only processes).
template <class T>
T covariance0(const KernelSpec& k, const T& s, const T& t) {
  k.check();
  if (!order_only(k.process) && k.integrations != 0)
    throw spec_error("covariance0 requires integrations == 0");
  if (s < 0 || s > 1 || t < 0 || t > 1) throw domain_error("arguments outside [0,1]");
  return base_covariance(k, s, t);
}

}  // namespace selfsim
