#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace spincm {

template <typename F>
CMatrix pole_residue(const PhaseState& state, Eigen::Index i, F&& f, int nodes) {
  double nearest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < state.x.size(); ++k) {
    if (k != i) nearest = std::min(nearest, std::abs(state.x[i] - state.x[k]));
  }
  const double radius = std::isfinite(nearest) ? 0.25 * nearest : 0.25;
  CMatrix sum;
  for (int j = 0; j < nodes; ++j) {
    const Complex offset = std::polar(radius, 2.0 * std::numbers::pi * j / nodes);
    const CMatrix value = f(state.x[i] + offset);
    sum = j == 0 ? CMatrix(offset * value) : CMatrix(sum + offset * value);
  }
  return sum / static_cast<double>(nodes);
}

}  // namespace spincm
