#pragma once

// Independent reference computations. Nothing in the production paths (lax, flows,
// kp) calls into this header; the verification suite and the tests compare against it.

#include "spincm/lax.hpp"
#include "spincm/phase.hpp"
#include "spincm/types.hpp"

#include <optional>

namespace spincm::oracle {

struct ContourOptions {
  int nodes = 256;
  double radius_factor = 2.0;  // radius = radius_factor * (||L||_inf + 1)
};

/// (1/2 pi i) \oint z^m (zI-L)^-1 [A (zI-L)^-1] dz over a circle enclosing the spectrum,
/// by the trapezoid rule in the angle.
CMatrix contour_residue(const CMatrix& L, int m, const std::optional<CMatrix>& A = std::nullopt,
                        const ContourOptions& options = {});

enum class Axis { Real, Imaginary };

/// Central differences of tr L^m, stepping each coordinate by +-h along `axis`
/// (h real or h i); both give the holomorphic derivative.
Gradient fd_gradient(const PhaseState& state, int m, double h = 1e-5, Axis axis = Axis::Real,
                     const Tolerances& tol = {});

/// Scalar rational Calogero-Moser positions at time t_final, from
/// x_i'' = -8 sum_{k != i} (x_i - x_k)^-3 with x_i'(0) = 2 p_i, integrated with an
/// adaptive Runge-Kutta-Fehlberg 7(8) scheme along the segment 0 -> t_final.
CVector scalar_calogero_positions(const CVector& x0, const CVector& p0, Complex t_final,
                                  double tolerance = 1e-14);

}  // namespace spincm::oracle
