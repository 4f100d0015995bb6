#pragma once

#include "spincm/phase.hpp"
#include "spincm/types.hpp"

#include <optional>
#include <vector>

namespace spincm {

/// Matrices derived from a phase point.
///   L_ii = -p_i,  L_ik = -(b_i^T a_k) / (x_i - x_k)
///   M_ii = 0,     M_ik = 2 (b_i^T a_k) / (x_i - x_k)^2
///   X = diag(x),  R_ik = b_i^T a_k
/// On the constraint surface R = I + [L, X].
struct LaxData {
  CMatrix L;
  CMatrix M;
  CMatrix X;
  CMatrix R;
};

/// Holomorphic partial derivatives of a scalar function on phase space.
/// Row i of da/db holds d/da_i^alpha, d/db_i^alpha.
struct Gradient {
  CVector dx;
  CVector dp;
  CMatrix da;
  CMatrix db;
};

/// R_ik = b_i^T a_k.
CMatrix pairing_matrix(const PhaseState& state);

/// Throws CollidingPoles when two poles are closer than tol.collision.
LaxData build_lax(const PhaseState& state, const Tolerances& tol = {});

/// L^m by repeated multiplication; L^0 = I.
CMatrix matrix_power(const CMatrix& L, int m);

/// H_m = tr L^m, m >= 1.
Complex hamiltonian(const PhaseState& state, int m, const Tolerances& tol = {});

/// (H_1, ..., H_count) sharing one Lax construction.
std::vector<Complex> hamiltonians(const PhaseState& state, int count, const Tolerances& tol = {});

/// The t_2 Hamiltonian written out in phase variables:
/// sum_i p_i^2 - sum_{i != k} (b_i^T a_k)(b_k^T a_i) / (x_i - x_k)^2.
Complex pair_hamiltonian(const PhaseState& state);

/// Analytic gradient of H_m through d tr L^m = m tr(L^{m-1} dL), using the sparsity
/// of dL: dL/dp_i = -E_ii, dL/dx_i touches row and column i, dL/da_i column i,
/// dL/db_i row i.
Gradient grad_hamiltonian(const PhaseState& state, int m, const Tolerances& tol = {});

/// Complex bilinear extension of {x_i, p_k} = delta_ik, {a_i^alpha, b_k^beta} = delta.
/// Throws DimensionMismatch if the gradients have different shapes.
Complex poisson_bracket(const Gradient& f, const Gradient& g);

/// Coefficient of z^-1 at infinity, computed exactly as a polynomial in L:
///   without A:  res z^m (zI - L)^-1            = L^m
///   with A:     res z^m (zI - L)^-1 A (zI - L)^-1 = sum_{j=0}^{m-1} L^j A L^{m-1-j}
/// m >= 0; the double resolvent gives the zero matrix for m = 0.
CMatrix resolvent_residue(const CMatrix& L, int m, const std::optional<CMatrix>& A = std::nullopt);

}  // namespace spincm
