#pragma once

#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

// Symmetric matrix; only the upper triangle is stored, so symmetry is exact
// by construction. precision_bits records the significand width the entries
// were rounded to (53 for double).
template <class T>
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(int n, unsigned precision_bits)
      : n_(n), bits_(precision_bits), data_(static_cast<size_t>(n) * (n + 1) / 2, T(0)) {}

  int order() const { return n_; }
  unsigned precision_bits() const { return bits_; }

  T& at(int i, int j) {  // i <= j
    return data_[index(i, j)];
  }
  const T& operator()(int i, int j) const {
    return i <= j ? data_[index(i, j)] : data_[index(j, i)];
  }

 private:
  size_t index(int i, int j) const {
    return static_cast<size_t>(i) * n_ - static_cast<size_t>(i) * (i - 1) / 2 +
           static_cast<size_t>(j - i);
  }

  int n_ = 0;
  unsigned bits_ = 53;
  std::vector<T> data_;
};

}  // namespace selfsim
