#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

// Parameters of a degenerate self-similar probability measure on [0,1]:
// a partition 0 = alpha_1 < ... < alpha_{n+1} = 1, affine offsets beta_k,
// and a single contracting piece: index m carries weight d (all other d_k
// vanish) with orientation bit e.
//
// All fields are exact rationals, so atom locations and weights come out
// exact and the tail-mass identities can be tested with '=='.
struct MeasureSpec {
  std::vector<Rational> alpha;  // size n+1
  std::vector<Rational> beta;   // size n
  Rational d;
  int m = 1;  // 1-based
  int e = 0;

  int n() const { return static_cast<int>(beta.size()); }

  Rational a(int k) const { return alpha[k] - alpha[k - 1]; }  // 1-based interval length

  // Weight multiplier of the scaled copy; positive for probability measures.
  Rational rho() const { return e == 0 ? d : -d; }

  // Throws spec_error on structural problems. A structurally sound spec can
  // still fail validate() -- that is a result, not an error.
  void check_structure() const {
    if (beta.size() < 2) throw spec_error("need n >= 2 intervals");
    if (alpha.size() != beta.size() + 1) throw spec_error("alpha must have n+1 entries");
    if (alpha.front() != 0 || alpha.back() != 1)
      throw spec_error("partition must start at 0 and end at 1");
    for (size_t k = 1; k < alpha.size(); ++k)
      if (!(alpha[k - 1] < alpha[k])) throw spec_error("alpha must be strictly increasing");
    if (!(abs(d) < 1)) throw spec_error("|d| >= 1 breaks the contraction");
    if (m < 1 || m > n()) throw spec_error("m out of range");
    if (e != 0 && e != 1) throw spec_error("e must be 0 or 1");
  }

  // S_m(t), the affine map [0,1] -> [alpha_m, alpha_{m+1}].
  Rational map_in(const Rational& t) const {
    Rational am = a(m);
    return e == 0 ? am * t + alpha[m - 1] : alpha[m] - am * t;
  }
};

struct Violation {
  int criterion;  // 1..4 from the probability-measure criteria, 5 = nondegeneracy
  std::string detail;
};

struct ValidationReport {
  bool valid = false;
  std::vector<Violation> violations;
};

// Left-continuous step function on [0,1]. values[i] is the value on
// ]breakpoints[i], breakpoints[i+1]]; the value at 0 is taken from the
// first interval.
struct PiecewiseConstant {
  std::vector<Rational> breakpoints;  // strictly increasing, first 0, last 1
  std::vector<Rational> values;       // size = breakpoints.size() - 1

  void check_structure() const {
    if (breakpoints.size() < 2) throw spec_error("piecewise constant needs >= 2 breakpoints");
    if (breakpoints.front() != 0 || breakpoints.back() != 1)
      throw spec_error("breakpoints must span [0,1]");
    for (size_t i = 1; i < breakpoints.size(); ++i)
      if (!(breakpoints[i - 1] < breakpoints[i]))
        throw spec_error("breakpoints must be strictly increasing");
    if (values.size() + 1 != breakpoints.size())
      throw spec_error("values/breakpoints size mismatch");
  }

  static PiecewiseConstant zero() { return {{Rational(0), Rational(1)}, {Rational(0)}}; }

  const Rational& operator()(const Rational& t) const {
    if (t < 0 || t > 1) throw domain_error("argument outside [0,1]");
    if (t == 0) return values.front();
    // left-continuous: value of the interval whose right-closed end holds t
    auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
    size_t idx = static_cast<size_t>(it - breakpoints.begin());
    if (*it == t && idx > 0) --idx;  // t == breakpoint: left interval
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
  }
};

struct Atom {
  Rational location;  // in (0,1)
  Rational weight;    // > 0
};

struct AtomList {
  std::vector<Atom> atoms;  // sorted by location
  int depth = 0;            // levels 0..depth included
  Rational tail_mass;       // rho^(depth+1), mass not represented

  Rational total_weight() const {
    Rational s = 0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

namespace detail {

// Level-0 jumps of the fixed point f at alpha_2..alpha_n. Forced by the
// one-sided limits of S[f]: away from the scaled copy the jump is
// beta_k - beta_{k-1}; at its ends the copy contributes d*e resp. d*(1-e).
inline std::vector<Atom> level0_jumps(const MeasureSpec& s) {
  std::vector<Atom> out;
  for (int k = 2; k <= s.n(); ++k) {
    Rational j;
    if (k == s.m)
      j = (s.beta[s.m - 1] + s.d * s.e) - s.beta[s.m - 2];
    else if (k == s.m + 1)
      j = s.beta[k - 1] - (s.beta[s.m - 1] + s.d * (1 - s.e));
    else
      j = s.beta[k - 1] - s.beta[k - 2];
    out.push_back({s.alpha[k - 1], j});
  }
  return out;
}

}  // namespace detail

// The probability-measure criteria, checked verbatim with exact arithmetic
// (every accepted input form is an exact rational). Criterion 5 is the
// nondegeneracy requirement: all n-1 level-0 jumps strictly positive.
inline ValidationReport validate(const MeasureSpec& s) {
  s.check_structure();
  ValidationReport rep;
  auto fail = [&rep](int c, std::string msg) { rep.violations.push_back({c, std::move(msg)}); };

  // 1: d_1 e_1 + beta_1 = 0 and d_n (1-e_n) + beta_n = 1, with d_k = 0 for k != m
  Rational left = (s.m == 1 ? s.d * s.e : Rational(0)) + s.beta.front();
  if (left != 0) fail(1, "d_1*e_1 + beta_1 = " + left.str() + ", expected 0");
  Rational right = (s.m == s.n() ? s.d * (1 - s.e) : Rational(0)) + s.beta.back();
  if (right != 1) fail(1, "d_n*(1-e_n) + beta_n = " + right.str() + ", expected 1");

  // 2: 0 < (-1)^e d < 1
  Rational r = s.rho();
  if (!(r > 0 && r < 1)) fail(2, "(-1)^e * d = " + r.str() + " outside (0,1)");

  // 3: beta_k strictly increasing
  for (int k = 1; k < s.n(); ++k)
    if (!(s.beta[k - 1] < s.beta[k]))
      fail(3, "beta_" + std::to_string(k) + " >= beta_" + std::to_string(k + 1));

  // 4: beta_{m-1} < d beta_n + beta_m < beta_{m+1} (one-sided at m = 1 or n)
  Rational mid = s.d * s.beta.back() + s.beta[s.m - 1];
  if (s.m > 1 && !(s.beta[s.m - 2] < mid))
    fail(4, "beta_{m-1} >= d*beta_n + beta_m = " + mid.str());
  if (s.m < s.n() && !(mid < s.beta[s.m]))
    fail(4, "d*beta_n + beta_m = " + mid.str() + " >= beta_{m+1}");

  // 5: no degenerate (zero or negative) jump at any alpha_2..alpha_n
  if (rep.violations.empty()) {
    for (const auto& atom : detail::level0_jumps(s))
      if (!(atom.weight > 0))
        fail(5, "nondegeneracy: zero jump at alpha = " + atom.location.str());
  }

  rep.valid = rep.violations.empty();
  return rep;
}

// Accumulation point of the nested intervals S_m^j(]0,1[).
inline Rational singular_point(const MeasureSpec& s) {
  s.check_structure();
  Rational am = s.a(s.m);
  Rational denom = s.e == 0 ? Rational(1) - am : Rational(1) + am;
  return s.alpha[s.m - 1 + s.e] / denom;
}

// The similarity operator S: copies beta_k on each interval and a shifted,
// shrunk (possibly reflected) copy of f onto ]alpha_m, alpha_{m+1}[.
inline PiecewiseConstant apply_similarity(const MeasureSpec& s, const PiecewiseConstant& f) {
  s.check_structure();
  f.check_structure();
  PiecewiseConstant out;
  for (int k = 1; k <= s.n(); ++k) {
    if (k != s.m) {
      out.breakpoints.push_back(s.alpha[k - 1]);
      out.values.push_back(s.beta[k - 1]);
      continue;
    }
    // image of f under S_m; reflection reverses the breakpoint order
    size_t nseg = f.values.size();
    for (size_t i = 0; i < nseg; ++i) {
      size_t seg = s.e == 0 ? i : nseg - 1 - i;
      Rational lo = s.e == 0 ? s.map_in(f.breakpoints[seg]) : s.map_in(f.breakpoints[seg + 1]);
      out.breakpoints.push_back(lo);
      out.values.push_back(s.d * f.values[seg] + s.beta[s.m - 1]);
    }
  }
  out.breakpoints.push_back(Rational(1));
  return out;
}

// All jumps of the fixed point contributed by scaling levels 0..J:
// level-j atoms are S_m^j images of the level-0 atoms with weights rho^j.
// Coinciding locations (possible only by exact collision) merge by weight.
inline AtomList atoms(const MeasureSpec& s, int depth) {
  auto rep = validate(s);
  if (!rep.valid) throw domain_error("atoms(): measure spec failed validation");
  if (depth < 0) throw domain_error("atoms(): depth must be >= 0");

  std::map<Rational, Rational> acc;
  std::vector<Atom> level = detail::level0_jumps(s);
  Rational mult = 1;
  for (int j = 0; j <= depth; ++j) {
    for (const auto& a : level) acc[a.location] += a.weight * mult;
    if (j < depth) {
      for (auto& a : level) a.location = s.map_in(a.location);
      mult *= s.rho();
    }
  }
  AtomList out;
  out.depth = depth;
  out.tail_mass = rational_pow(s.rho(), depth + 1);
  out.atoms.reserve(acc.size());
  for (auto& [loc, w] : acc) out.atoms.push_back({loc, w});
  return out;
}

// f(t) truncated at `depth` levels: the sum of atom weights strictly below t
// (left-continuous). Absolute error vs. the true primitive is <= tail_mass.
inline Rational cdf(const MeasureSpec& s, const Rational& t, int depth) {
  if (t < 0 || t > 1) throw domain_error("cdf(): argument outside [0,1]");
  AtomList al = atoms(s, depth);
  Rational sum = 0;
  for (const auto& a : al.atoms) {
    if (a.location < t) sum += a.weight;
    else break;
  }
  return sum;
}

inline double cdf(const MeasureSpec& s, double t, int depth) {
  return static_cast<double>(cdf(s, Rational(t), depth));
}

}  // namespace selfsim
