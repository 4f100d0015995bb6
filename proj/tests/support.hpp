#pragma once

#include "spincm/phase.hpp"
#include "spincm/types.hpp"

#include <doctest.h>

#include <random>

namespace spincm::test {

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double rel_diff(const CMatrix& a, const CMatrix& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                             double box = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex{u(rng), u(rng)};
  }
  return m;
}

/// Two poles at -1 and 1 with unit scalar spins.
inline PhaseState two_pole_state() {
  CVector x(2);
  x << -1.0, 1.0;
  CVector p = CVector::Zero(2);
  CMatrix a = CMatrix::Ones(2, 1);
  CMatrix b = CMatrix::Ones(2, 1);
  return make_state(x, p, a, b);
}

inline PhaseState single_pole_state(Complex x0, Complex p0, Complex a0 = 1.0) {
  CVector x(1), p(1);
  x << x0;
  p << p0;
  CMatrix a(1, 1), b(1, 1);
  a << a0;
  b << 1.0 / a0;
  return make_state(x, p, a, b);
}

}  // namespace spincm::test
