#include <doctest.h>

#include <vector>

#include "selfsim/measure.hpp"
#include "selfsim/rng.hpp"
#include "test_helpers.hpp"

using namespace selfsim;
using testing::figure_spec;
using testing::mirrored_spec;
using testing::n4_spec;

namespace {

// sup |f - g| over [0,1] for two step functions, exact in rationals
Rational pc_sup_diff(const PiecewiseConstant& f, const PiecewiseConstant& g) {
  std::vector<Rational> bps;
  bps.insert(bps.end(), f.breakpoints.begin(), f.breakpoints.end());
  bps.insert(bps.end(), g.breakpoints.begin(), g.breakpoints.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  Rational best = 0;
  for (size_t i = 0; i + 1 < bps.size(); ++i) {
    Rational mid = (bps[i] + bps[i + 1]) / 2;
    Rational d = abs(f(mid) - g(mid));
    if (d > best) best = d;
  }
  return best;
}

// step function whose jumps are the truncated measure's atoms
PiecewiseConstant cdf_pc(const MeasureSpec& s, int depth) {
  AtomList al = atoms(s, depth);
  PiecewiseConstant pc;
  pc.breakpoints.push_back(Rational(0));
  Rational acc = 0;
  pc.values.push_back(acc);
  for (const auto& a : al.atoms) {
    pc.breakpoints.push_back(a.location);
    acc += a.weight;
    pc.values.push_back(acc);
  }
  pc.breakpoints.push_back(Rational(1));
  return pc;
}

}  // namespace

TEST_CASE("validate: figure fixture and its perturbations") {
  auto rep = validate(figure_spec());
  CHECK(rep.valid);
  CHECK(rep.violations.empty());

  // beta_2 = beta_1 = 0 breaks strict monotonicity (criterion 3)
  auto s = figure_spec();
  s.beta[1] = 0;
  rep = validate(s);
  CHECK_FALSE(rep.valid);
  REQUIRE_FALSE(rep.violations.empty());
  bool crit3 = false;
  for (auto& v : rep.violations) crit3 |= (v.criterion == 3);
  CHECK(crit3);

  // d = -1/3 with e = 0: (-1)^0 d < 0 (criterion 2)
  s = figure_spec();
  s.d = Rational(-1, 3);
  rep = validate(s);
  CHECK_FALSE(rep.valid);
  bool crit2 = false;
  for (auto& v : rep.violations) crit2 |= (v.criterion == 2);
  CHECK(crit2);

  CHECK(validate(mirrored_spec()).valid);
  CHECK(validate(n4_spec()).valid);
}

TEST_CASE("validate: structural problems are errors, not violations") {
  auto s = figure_spec();
  s.alpha[1] = Rational(9, 10);  // not increasing
  CHECK_THROWS_AS(validate(s), spec_error);

  s = figure_spec();
  s.d = Rational(3, 2);  // |d| >= 1
  CHECK_THROWS_AS(validate(s), spec_error);

  s = figure_spec();
  s.alpha.back() = Rational(9, 10);
  CHECK_THROWS_AS(validate(s), spec_error);

  s = figure_spec();
  s.beta.pop_back();
  CHECK_THROWS_AS(validate(s), spec_error);
}

TEST_CASE("validate is a pure predicate") {
  auto r1 = validate(figure_spec());
  auto r2 = validate(figure_spec());
  CHECK(r1.valid == r2.valid);
  CHECK(r1.violations.size() == r2.violations.size());
  CHECK(r1.valid == r1.violations.empty());
}

TEST_CASE("singular_point") {
  CHECK(singular_point(figure_spec()) == Rational(3, 5));

  // m=1, e=0 pins the singular point at 0
  MeasureSpec s;
  s.alpha = {Rational(0), Rational(3, 10), Rational(4, 5), Rational(1)};
  s.beta = {Rational(0), Rational(1, 2), Rational(1)};
  s.m = 1;
  s.e = 0;
  s.d = Rational(1, 4);
  CHECK(singular_point(s) == 0);

  // figure partition with e=1: alpha_3 / (1 + a_2) = (4/5)/(3/2)
  auto f = figure_spec();
  f.e = 1;
  CHECK(singular_point(f) == Rational(8, 15));
  CHECK(singular_point(mirrored_spec()) == Rational(8, 15));

  // always inside [0,1]
  CHECK(singular_point(n4_spec()) >= 0);
  CHECK(singular_point(n4_spec()) <= 1);
}

TEST_CASE("apply_similarity: first two iterates of the figure spec") {
  auto s = figure_spec();
  auto f1 = apply_similarity(s, PiecewiseConstant::zero());
  REQUIRE(f1.breakpoints == std::vector<Rational>{Rational(0), Rational(3, 10), Rational(4, 5), Rational(1)});
  REQUIRE(f1.values == std::vector<Rational>{Rational(0), Rational(1, 3), Rational(1)});

  auto f2 = apply_similarity(s, f1);
  REQUIRE(f2.breakpoints ==
          std::vector<Rational>{Rational(0), Rational(3, 10), Rational(9, 20), Rational(7, 10),
                                Rational(4, 5), Rational(1)});
  REQUIRE(f2.values == std::vector<Rational>{Rational(0), Rational(1, 3), Rational(4, 9),
                                             Rational(2, 3), Rational(1)});
}

TEST_CASE("apply_similarity: reflection reverses the copied graph") {
  auto s = mirrored_spec();
  auto f1 = apply_similarity(s, PiecewiseConstant::zero());
  auto f2 = apply_similarity(s, f1);
  // inside ]0.3, 0.8[ the copy runs backwards: d*1+beta_2 first, d*0+beta_2 last
  REQUIRE(f2.values.size() == 5);
  CHECK(f2.values[1] == s.d * 1 + s.beta[1]);  // 4/15
  CHECK(f2.values[2] == s.d * s.beta[1] + s.beta[1]);
  CHECK(f2.values[3] == s.beta[1]);
  // still monotone
  for (size_t i = 1; i < f2.values.size(); ++i) CHECK(f2.values[i - 1] <= f2.values[i]);
}

TEST_CASE("contraction: sup|S f - S g| = |d| sup|f - g|") {
  auto s = figure_spec();
  std::uint64_t seed = 20240801;
  for (int trial = 0; trial < 12; ++trial) {
    auto mk = [&](std::uint64_t stream) {
      PiecewiseConstant pc;
      pc.breakpoints.push_back(Rational(0));
      int cuts = 1 + static_cast<int>(rng::counter_hash(seed, stream, 0) % 4);
      for (int i = 0; i < cuts; ++i) {
        long num = 1 + static_cast<long>(rng::counter_hash(seed, stream, 10 + i) % 30);
        pc.breakpoints.push_back(Rational(num, 31));
      }
      std::sort(pc.breakpoints.begin(), pc.breakpoints.end());
      pc.breakpoints.erase(std::unique(pc.breakpoints.begin(), pc.breakpoints.end()),
                           pc.breakpoints.end());
      pc.breakpoints.push_back(Rational(1));
      for (size_t i = 0; i + 1 < pc.breakpoints.size(); ++i) {
        long num = static_cast<long>(rng::counter_hash(seed, stream, 100 + i) % 21) - 10;
        pc.values.push_back(Rational(num, 7));
      }
      return pc;
    };
    auto f = mk(2 * trial), g = mk(2 * trial + 1);
    Rational lhs = pc_sup_diff(apply_similarity(s, f), apply_similarity(s, g));
    Rational rhs = abs(s.d) * pc_sup_diff(f, g);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("fixed point: S[cdf_J] = cdf_{J+1} and sup|S f - f| <= |d|^{J+1}") {
  for (const auto& s : {figure_spec(), mirrored_spec(), n4_spec()}) {
    PiecewiseConstant it = PiecewiseConstant::zero();
    const int J = 6;
    for (int j = 0; j <= J; ++j) it = apply_similarity(s, it);
    // J+1 applications from zero reproduce the depth-J truncated primitive
    CHECK(pc_sup_diff(it, cdf_pc(s, J)) == 0);
    Rational gap = pc_sup_diff(apply_similarity(s, it), it);
    CHECK(gap <= rational_pow(abs(s.d), J + 1));
  }
}

TEST_CASE("atoms: figure measure, exact rational values") {
  auto s = figure_spec();
  auto a0 = atoms(s, 0);
  REQUIRE(a0.atoms.size() == 2);
  CHECK(a0.atoms[0].location == Rational(3, 10));
  CHECK(a0.atoms[0].weight == Rational(1, 3));
  CHECK(a0.atoms[1].location == Rational(4, 5));
  CHECK(a0.atoms[1].weight == Rational(1, 3));
  CHECK(a0.tail_mass == Rational(1, 3));

  auto a1 = atoms(s, 1);
  REQUIRE(a1.atoms.size() == 4);
  CHECK(a1.atoms[1].location == Rational(9, 20));
  CHECK(a1.atoms[1].weight == Rational(1, 9));
  CHECK(a1.atoms[2].location == Rational(7, 10));
  CHECK(a1.atoms[2].weight == Rational(1, 9));
  CHECK(a1.tail_mass == Rational(1, 9));
}

TEST_CASE("atoms: mass identity, positivity, ordering") {
  for (const auto& s : {figure_spec(), mirrored_spec(), n4_spec()}) {
    for (int J : {0, 3, 9}) {
      auto al = atoms(s, J);
      CHECK(al.total_weight() + al.tail_mass == 1);
      CHECK(al.tail_mass == rational_pow(s.rho(), J + 1));
      for (size_t i = 0; i < al.atoms.size(); ++i) {
        CHECK(al.atoms[i].weight > 0);
        CHECK(al.atoms[i].location > 0);
        CHECK(al.atoms[i].location < 1);
        if (i) CHECK(al.atoms[i - 1].location < al.atoms[i].location);
      }
    }
  }
}

TEST_CASE("atoms: errors") {
  auto s = figure_spec();
  s.beta[1] = 0;  // invalid measure
  CHECK_THROWS_AS(atoms(s, 3), domain_error);
  CHECK_THROWS_AS(atoms(figure_spec(), -1), domain_error);
}

TEST_CASE("singular accumulation: deep atoms live in S_m^J(]0,1[)") {
  for (const auto& s : {figure_spec(), mirrored_spec()}) {
    const int J = 3;
    Rational lo = 0, hi = 1;
    for (int j = 0; j < J; ++j) {
      Rational l2 = s.map_in(lo), h2 = s.map_in(hi);
      lo = l2 < h2 ? l2 : h2;
      hi = l2 < h2 ? h2 : l2;
    }
    CHECK(hi - lo == rational_pow(s.a(s.m), J));
    auto shallow = atoms(s, J - 1);
    auto deep = atoms(s, J + 4);
    // every atom of the deep list that is not in the shallow one is level >= J
    for (const auto& a : deep.atoms) {
      bool is_shallow = false;
      for (const auto& b : shallow.atoms) is_shallow |= (b.location == a.location);
      if (!is_shallow) {
        CHECK(a.location > lo);
        CHECK(a.location < hi);
      }
    }
    Rational xhat = singular_point(s);
    CHECK(abs(xhat - lo) <= hi - lo);
    CHECK(abs(hi - xhat) <= hi - lo);
  }
}

TEST_CASE("cdf: figure examples") {
  auto s = figure_spec();
  CHECK(cdf(s, Rational(0), 5) == 0);
  CHECK(cdf(s, Rational(1, 5), 5) == 0);
  CHECK(cdf(s, Rational(1, 2), 1) == Rational(4, 9));
  CHECK(cdf(s, Rational(1, 2), 9) == Rational(4, 9));  // no atoms in (0.45, 0.5)
  CHECK(cdf(s, Rational(1), 9) == 1 - rational_pow(s.rho(), 10));
  CHECK_THROWS_AS(cdf(s, Rational(3, 2), 3), domain_error);
}

TEST_CASE("cdf: nondecreasing on a grid, agrees with the iterated primitive") {
  for (const auto& s : {figure_spec(), mirrored_spec(), n4_spec()}) {
    const int J = 5;
    PiecewiseConstant it = PiecewiseConstant::zero();
    for (int j = 0; j <= J; ++j) it = apply_similarity(s, it);
    Rational prev = -1;
    for (int i = 0; i <= 64; ++i) {
      Rational t(i, 64);
      Rational v = cdf(s, t, J);
      CHECK(v >= prev);
      prev = v;
      bool is_breakpoint = false;
      for (const auto& b : it.breakpoints) is_breakpoint |= (b == t);
      if (!is_breakpoint && t > 0) CHECK(v == it(t));
    }
  }
}

TEST_CASE("random valid specs keep the mass identity") {
  std::uint64_t seed = 777;
  int found = 0;
  for (std::uint64_t trial = 0; trial < 4000 && found < 15; ++trial) {
    auto pick = [&](std::uint64_t k, long den) {
      return Rational(static_cast<long>(rng::counter_hash(seed, trial, k) % (den - 1)) + 1, den);
    };
    MeasureSpec s;
    int n = 2 + static_cast<int>(rng::counter_hash(seed, trial, 0) % 3);
    std::vector<Rational> cuts;
    for (int i = 0; i < n - 1; ++i) cuts.push_back(pick(i + 1, 12));
    std::sort(cuts.begin(), cuts.end());
    if (std::unique(cuts.begin(), cuts.end()) != cuts.end()) continue;
    s.alpha.push_back(Rational(0));
    for (auto& c : cuts) s.alpha.push_back(c);
    s.alpha.push_back(Rational(1));
    std::vector<Rational> bcuts;
    for (int i = 0; i < n - 1; ++i) bcuts.push_back(pick(20 + i, 16));
    std::sort(bcuts.begin(), bcuts.end());
    if (std::unique(bcuts.begin(), bcuts.end()) != bcuts.end()) continue;
    s.beta.push_back(Rational(0));
    for (auto& b : bcuts) s.beta.push_back(b);
    // last beta handled below depending on m
    s.m = 1 + static_cast<int>(rng::counter_hash(seed, trial, 40) % n);
    s.e = static_cast<int>(rng::counter_hash(seed, trial, 41) % 2);
    Rational mag = pick(42, 9);
    s.d = s.e == 0 ? mag : -mag;
    s.beta.back() = s.m == s.n() + 1 ? s.beta.back() : s.beta.back();
    // fix endpoint conditions where forced
    if (s.m == 1) s.beta.front() = -s.d * s.e;
    if (s.m == n) s.beta.back() = Rational(1) - s.d * (1 - s.e);
    else s.beta.back() = Rational(1);
    MeasureSpec candidate = s;
    try {
      if (!validate(candidate).valid) continue;
    } catch (const spec_error&) {
      continue;
    }
    ++found;
    auto al = atoms(candidate, 6);
    CHECK(al.total_weight() + al.tail_mass == 1);
  }
  CHECK(found >= 10);
}
