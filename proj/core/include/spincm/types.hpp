#pragma once

#include <Eigen/Dense>

#include <complex>

namespace spincm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Thresholds shared by construction, flows and evaluation of the pole ansatz.
struct Tolerances {
  double collision = 1e-6;   // minimum allowed |x_i - x_k| (and |x - x_i| for evaluation)
  double constraint = 1e-10; // maximum allowed |b_i^T a_i - 1| at construction
};

}  // namespace spincm
