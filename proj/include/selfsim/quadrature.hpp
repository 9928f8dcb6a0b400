#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "selfsim/kernel.hpp"
#include "selfsim/real.hpp"

namespace selfsim {

template <class T>
unsigned scalar_precision_bits() {
  return 53;
}
template <>
inline unsigned scalar_precision_bits<Real>() {
  Real probe(0);
  return precision_bits_of(probe);
}

template <class T>
struct GLRule {
  std::vector<T> x, w;  // nodes/weights on [-1,1]
};

// Gauss-Legendre nodes by Newton iteration on P_n, seeded with the
// Chebyshev estimates; carried at the scalar's working precision.
template <class T>
GLRule<T> make_gl_rule(int n) {
  using std::abs;
  using std::cos;
  GLRule<T> r;
  r.x.assign(n, T(0));
  r.w.assign(n, T(0));
  T tol = T(1);
  {
    int bits = static_cast<int>(scalar_precision_bits<T>());
    for (int i = 0; i < bits - 1; ++i) tol /= 2;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    T x = T(std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)));
    T dp(0);
    for (int it = 0; it < 100; ++it) {
      T p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        T p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = T(n) * (x * p1 - p0) / (x * x - 1);
      T dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= tol) break;
    }
    // recompute derivative at the converged node for the weight
    {
      T p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        T p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = T(n) * (x * p1 - p0) / (x * x - 1);
    }
    T w = 2 / ((1 - x * x) * dp * dp);
    r.x[i] = -x;  // ascending order
    r.w[i] = w;
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = w;
  }
  return r;
}

template <class T>
const GLRule<T>& gl_rule(int n) {
  thread_local std::map<std::pair<int, unsigned>, GLRule<T>> cache;
  auto key = std::make_pair(n, scalar_precision_bits<T>());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_gl_rule<T>(n)).first;
  return it->second;
}

// Signed integral over [a,b] split at the given interior kink points.
template <class T, class F>
T integrate_split(F&& f, const T& a, const T& b, std::vector<T> splits, int nodes) {
  const GLRule<T>& rule = gl_rule<T>(nodes);
  T lo = tmin(a, b), hi = a < b ? b : a;
  std::vector<T> pts;
  pts.push_back(a);
  for (auto& s : splits)
    if (s > lo && s < hi) pts.push_back(s);
  pts.push_back(b);
  if (a < b) std::sort(pts.begin() + 1, pts.end() - 1);
  else std::sort(pts.begin() + 1, pts.end() - 1, std::greater<T>());
  T total(0);
  for (size_t p = 0; p + 1 < pts.size(); ++p) {
    T h = (pts[p + 1] - pts[p]) / 2;
    T mid = (pts[p + 1] + pts[p]) / 2;
    T acc(0);
    for (int i = 0; i < nodes; ++i) acc += rule.w[i] * f(mid + h * rule.x[i]);
    total += h * acc;
  }
  return total;
}

struct QuadOptions {
  int nodes = 32;
  double rel_tol = 1e-12;
  bool check = true;  // node-count doubling estimate
};

// Covariance of the s-times integrated (and, for the centered family,
// re-centered after every integration) process. Evaluation is recursive:
// each level integrates the previous level's kernel from its endpoint, with
// panels split at the diagonal kink.
template <class T>
class CovEvaluator {
 public:
  explicit CovEvaluator(KernelSpec k) : k_(std::move(k)) {
    k_.check();
    centered_ = (k_.process == Process::centered_wiener ||
                 k_.process == Process::centered_bridge) &&
                k_.integrations > 0;
    closed_wiener_ = k_.process == Process::wiener &&
                     std::all_of(k_.endpoints.begin(), k_.endpoints.end(),
                                 [](int b) { return b == 0; });
  }

  bool exact() const {
    return k_.integrations == 0 || order_only(k_.process) || closed_wiener_;
  }

  T eval(const T& s, const T& t, int nodes) const {
    if (k_.integrations == 0 || order_only(k_.process)) return base_covariance(k_, s, t);
    if (closed_wiener_) return iw_cross(k_.integrations, k_.integrations, s, t);
    return cen(k_.integrations, s, t, nodes);
  }

 private:
  T endpoint(int lev) const { return T(k_.endpoints[lev - 1]); }

  // covariance of the level-lev integral, before any centering at this level
  T raw(int lev, const T& s, const T& t, int nodes) const {
    T b = endpoint(lev);
    auto inner = [&](const T& x) {
      return integrate_split([&](const T& y) { return cen(lev - 1, x, y, nodes); }, b, t, {x},
                             nodes);
    };
    return integrate_split(inner, b, s, {t}, nodes);
  }

  T cen(int lev, const T& s, const T& t, int nodes) const {
    if (lev == 0) return base_covariance(k_, s, t);  // base closed forms are already centered
    if (!centered_) return raw(lev, s, t, nodes);
    return raw(lev, s, t, nodes) - mrow(lev, s, nodes) - mrow(lev, t, nodes) + mm(lev, nodes);
  }

  // M(x) = int_0^1 raw(lev, x, y) dy, with the y-integral folded by Fubini:
  // int_0^1 dy int_b^y g = int_0^1 w_b(y') g(y') dy', w_0 = 1-y', w_1 = -y'.
  T mrow(int lev, const T& x, int nodes) const {
    T b = endpoint(lev);
    auto outer = [&](const T& xs) {
      auto wf = [&](const T& y) {
        T w = k_.endpoints[lev - 1] == 0 ? 1 - y : -y;
        return w * cen(lev - 1, xs, y, nodes);
      };
      return integrate_split(wf, T(0), T(1), {xs}, nodes);
    };
    return integrate_split(outer, b, x, {}, nodes);
  }

  T mm(int lev, int nodes) const {
    auto key = std::make_pair(lev, nodes);
    auto it = mm_cache_.find(key);
    if (it != mm_cache_.end()) return it->second;
    T b = endpoint(lev);
    auto outer = [&](const T& xs) {
      T wx = k_.endpoints[lev - 1] == 0 ? 1 - xs : -xs;
      auto wf = [&](const T& y) {
        T w = k_.endpoints[lev - 1] == 0 ? 1 - y : -y;
        return w * cen(lev - 1, xs, y, nodes);
      };
      return wx * integrate_split(wf, T(0), T(1), {xs}, nodes);
    };
    T v = integrate_split(outer, T(0), T(1), {}, nodes);
    mm_cache_.emplace(key, v);
    return v;
  }

  KernelSpec k_;
  bool centered_ = false;
  bool closed_wiener_ = false;
  mutable std::map<std::pair<int, int>, T> mm_cache_;
};

// E X_s(t) X_s(u) for integrations >= 1. The wiener all-zero-endpoints case
// uses the exact polynomial; everything else goes through nested quadrature
// whose error is estimated by raising the node count by half.
template <class T>
T integrated_covariance(const KernelSpec& k, const T& t, const T& u, QuadOptions opt = {}) {
  using std::abs;
  k.check();
  if (k.integrations < 1) throw spec_error("integrated_covariance requires integrations >= 1");
  if (t < 0 || t > 1 || u < 0 || u > 1) throw domain_error("arguments outside [0,1]");
  CovEvaluator<T> ev(k);
  if (ev.exact() || !opt.check) return ev.eval(t, u, opt.nodes);
  T v1 = ev.eval(t, u, opt.nodes);
  T v2 = ev.eval(t, u, opt.nodes + opt.nodes / 2);
  T scale = abs(v2) > abs(v1) ? abs(v2) : abs(v1);
  if (scale > 0) {
    T rel = abs(v1 - v2) / scale;
    if (rel > opt.rel_tol)
      throw quadrature_error("quadrature did not reach the requested tolerance",
                             static_cast<double>(rel));
  }
  return v2;
}

// Full dispatcher: closed forms where available, quadrature otherwise.
template <class T>
T covariance(const KernelSpec& k, const T& s, const T& t, QuadOptions opt = {}) {
  k.check();
  if (k.integrations == 0 || order_only(k.process)) return covariance0(k, s, t);
  return integrated_covariance(k, s, t, opt);
}

}  // namespace selfsim
