#pragma once

#include "spincm/types.hpp"

#include <cstdint>

namespace spincm {

/// A point of the spin Calogero-Moser phase space.
///
/// Row i of `a` and `b` holds the spin vectors a_i, b_i (length N = spin_dim).
/// The pairing b_i^T a_i is bilinear; no complex conjugation is involved anywhere.
/// Invariants (separation, b_i^T a_i = 1) are checked by make_state; states
/// produced by a flow are only monitored, never re-projected.
struct PhaseState {
  CVector x;
  CVector p;
  CMatrix a;
  CMatrix b;

  int n_particles() const { return static_cast<int>(x.size()); }
  int spin_dim() const { return static_cast<int>(a.cols()); }
};

/// Values of the hierarchy times, used only in the exponential gauge factor.
struct TimeVector {
  CVector t = CVector::Zero(3);

  /// xi(t, z) = sum_k t_k z^k, k starting at 1.
  Complex xi(Complex z) const;
};

/// Validated construction. Throws DimensionMismatch, NonFiniteValue,
/// CollidingPoles or ConstraintViolated.
PhaseState make_state(CVector x, CVector p, CMatrix a, CMatrix b, const Tolerances& tol = {});

/// Throws the same errors as make_state if `state` breaks an invariant.
void validate(const PhaseState& state, const Tolerances& tol = {});

/// Checks shapes only.
void check_dimensions(const PhaseState& state);

/// min_{i != k} |x_i - x_k|; +inf for a single particle.
double min_separation(const PhaseState& state);

/// max_i |b_i^T a_i - 1|.
double constraint_drift(const PhaseState& state);

/// Throws CollidingPoles if two poles are closer than `eps`.
void check_separation(const PhaseState& state, double eps, Complex time = {});

struct RandomStateOptions {
  double separation = 1.5;
  double momentum_box = 0.5;  // re/im of p_i uniform in [-box, box]
  double spin_box = 1.0;      // re/im of a_i entries uniform in [-box, box] before normalization
  double spin_noise = 0.5;    // b_i = conj(a_i) + noise, |noise^T a_i| <= spin_noise
  double pairing_floor = 1e-3;
  int max_retries = 64;
};

/// Deterministic random instance. Poles sit on a jittered lattice so that every
/// pairwise distance is at least `separation`; a_i has unit norm and b_i, drawn
/// around conj(a_i), is rescaled so that b_i^T a_i = 1 holds to rounding. Throws DegenerateDraw if no admissible b_i
/// is found within the retry budget.
PhaseState random_state(int n_particles, int spin_dim, std::uint64_t seed,
                        const RandomStateOptions& options = {});

/// a_i -> lambda_i a_i, b_i -> b_i / lambda_i. Throws ZeroScale.
PhaseState gauge_rescale(const PhaseState& state, const CVector& lambda);

}  // namespace spincm
