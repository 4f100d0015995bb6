#pragma once

#include "spincm/phase.hpp"
#include "spincm/types.hpp"

#include <span>
#include <vector>

namespace spincm {

/// Row i holds c_i (resp. c*_i), the residue vectors of the Baker-Akhiezer pair.
struct SpinorPair {
  CMatrix c;
  CMatrix c_star;
};

enum class Gauge { Stripped, Full };

/// Baker-Akhiezer pair at one (x, z). In the stripped gauge
///   psi        = I + sum_i a_i c_i^T / (x - x_i)
///   psi_dagger = I + sum_i c*_i b_i^T / (x - x_i);
/// the full gauge multiplies them by exp(+-(x z + xi(t, z))).
struct BASample {
  Complex z;
  Complex x;
  Gauge gauge = Gauge::Stripped;
  CMatrix c;
  CMatrix c_star;
  CMatrix psi_tilde;
  CMatrix psi_dagger_tilde;
};

struct TauParams {
  Complex C{1.0, 0.0};
  Complex A{0.0, 0.0};
};

/// Smallest reciprocal condition number accepted for (zI - L).
inline constexpr double kSpectralRcondFloor = 1e-12;

/// c = -(zI - L)^-1 b and c* = (zI - L)^-T a from a single LU factorization.
/// Throws SpectralCollision when z is (numerically) an eigenvalue of L.
SpinorPair solve_c(const PhaseState& state, Complex z, const Tolerances& tol = {});

BASample psi_pair(const PhaseState& state, const TimeVector& times, Complex z, Complex x,
                  Gauge gauge = Gauge::Stripped, const Tolerances& tol = {});

/// Stripped psi built from precomputed c; the x-derivatives are those of the pole ansatz.
struct PsiJet {
  CMatrix value;
  CMatrix dx;
  CMatrix dxx;
};
PsiJet psi_tilde_jet(const PhaseState& state, const CMatrix& c, Complex x,
                     const Tolerances& tol = {});
PsiJet psi_dagger_tilde_jet(const PhaseState& state, const CMatrix& c_star, Complex x,
                            const Tolerances& tol = {});

/// w1 = -sum_i a_i b_i^T / (x - x_i). Throws PoleHit.
CMatrix w1(const PhaseState& state, Complex x, const Tolerances& tol = {});

/// V = -2 dw1/dx = -2 sum_i a_i b_i^T / (x - x_i)^2. Throws PoleHit.
CMatrix potential_v(const PhaseState& state, Complex x, const Tolerances& tol = {});

/// tau = C exp(A x) prod_i (x - x_i); an empty root list is allowed.
Complex tau(std::span<const Complex> roots, const TauParams& params, Complex x);
Complex tau(const PhaseState& state, const TauParams& params, Complex x);

/// d log tau / dx = A + sum_i 1 / (x - x_i).
Complex dlog_tau_dx(std::span<const Complex> roots, const TauParams& params, Complex x);
Complex dlog_tau_dx(const PhaseState& state, const TauParams& params, Complex x);

/// Residuals of the t_2 linear problems in the stripped gauge,
///    d_t2 psi          =  2 z psi'  + psi''  + V psi
///   -d_t2 psi_dagger   = -2 z psi†' + psi†'' + psi† V,
/// with d_t2 from central differences of states flowed by +-dt2 and x-derivatives
/// analytic. Maximum absolute entry over the grid.
struct LinearProblemResidual {
  double psi = 0.0;
  double psi_dagger = 0.0;
  double max() const { return psi > psi_dagger ? psi : psi_dagger; }
};

LinearProblemResidual linear_problem_residual(const PhaseState& state, Complex z,
                                              std::span<const Complex> x_grid, double dt2,
                                              const Tolerances& tol = {});

/// res_{z=inf} z^m psi(x) psi_dagger(x) as an exact rational function of x, built
/// from resolvent residues of L.
CMatrix residue_product(const PhaseState& state, int m, Complex x, const Tolerances& tol = {});

/// -d_tm w1 at x, assembled from the gradient vector field:
/// sum_i [ d(a_i b_i^T) / (x - x_i) + a_i b_i^T x'_i / (x - x_i)^2 ].
CMatrix w1_flow_rate(const PhaseState& state, int m, Complex x, const Tolerances& tol = {});

struct ResidueIdentityResidual {
  double entrywise = 0.0;         // max |residue_product - w1_flow_rate| over samples, entrywise
  double trace = 0.0;             // max |tr residue_product - sum_i x'_i / (x - x_i)^2|
  double first_order_pole = 0.0;  // max_i |tr of the simple-pole coefficient at x_i|
};

ResidueIdentityResidual residue_identity_residual(const PhaseState& state, int m,
                                                  std::span<const Complex> x_samples,
                                                  const Tolerances& tol = {});

}  // namespace spincm
