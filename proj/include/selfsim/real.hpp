#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>

#include "selfsim/rational.hpp"

namespace selfsim {

// Variable-precision binary float. Working precision is the thread default;
// use PrecisionScope to pin it for a computation.
using Real = boost::multiprecision::mpfr_float;

inline unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.3010299956639812)) + 2;
}

inline unsigned precision_bits_of(const Real& x) {
  return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

// Sets the thread-default significand width to (at least) `bits`, restores on exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision()) {
    Real::default_precision(digits10_for_bits(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

// Round x to exactly `bits` significand bits (to nearest).
inline void round_to_bits(Real& x, unsigned bits) {
  mpfr_prec_round(x.backend().data(), static_cast<mpfr_prec_t>(bits), MPFR_RNDN);
}

inline Real pow2(long e) {
  Real one = 1;
  return ldexp(one, e);
}

inline Real to_real(const Rational& r) { return Real(r); }

// Decimal rendering with enough digits that parsing back at >= `bits` of
// precision reproduces the value exactly.
inline std::string decimal_string(const Real& x, unsigned bits) {
  return x.str(digits10_for_bits(bits) + 2, std::ios_base::scientific);
}

inline Real parse_real(const std::string& s) { return Real(s); }

}  // namespace selfsim
