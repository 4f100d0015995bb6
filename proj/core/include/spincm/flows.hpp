#pragma once

#include "spincm/lax.hpp"
#include "spincm/phase.hpp"
#include "spincm/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace spincm {

/// Time derivative of every phase coordinate along one hierarchy flow.
struct Tangent {
  CVector x;
  CVector p;
  CMatrix a;
  CMatrix b;
};

/// Hamiltonian vector field of H_m:
///   x' = dH/dp,  p' = -dH/dx,  a' = dH/db,  b' = -dH/da.
Tangent vector_field_gradient(const PhaseState& state, int m, const Tolerances& tol = {});

/// Vector field read off the residue identity at infinity, evaluated exactly with
/// resolvent_residue. With S = res z^m (zI-L)^-1 R (zI-L)^-1 and L^m = res z^m (zI-L)^-1:
///   x'_i = -S_ii
///   a'_i = sum_k (L^m)_ki a_k - sum_{k != i} S_ki a_k / (x_i - x_k)
///   b'_i = -sum_k (L^m)_ik b_k - sum_{k != i} S_ik b_k / (x_i - x_k)
/// p' has no residue expression and is taken from the gradient field.
///
/// x' coincides with the gradient field. a', b' coincide with it only up to the
/// infinitesimal gauge rescaling returned by gauge_direction(state, m); the products
/// a_i b_i^T evolve identically under both fields.
Tangent vector_field_residue(const PhaseState& state, int m, const Tolerances& tol = {});

/// (0, 0, mu_i a_i, -mu_i b_i) with mu_i = (L^m)_ii: the difference
/// vector_field_residue - vector_field_gradient on the constraint surface.
Tangent gauge_direction(const PhaseState& state, int m, const Tolerances& tol = {});

/// d/dt (a_i b_i^T) for each particle, a gauge-invariant summary of (a', b').
std::vector<CMatrix> spin_product_rates(const PhaseState& state, const Tangent& tangent);

enum class Method { RK4, RK45 };
enum class FieldRoute { Gradient, Residue };

struct FlowSpec {
  int m = 2;
  Complex t_final{1.0, 0.0};
  double dt = 1e-3;             // step length along the segment 0 -> t_final (RK4), initial step (RK45)
  Method method = Method::RK4;
  int record_every = 1;
  FieldRoute route = FieldRoute::Gradient;
  double rk45_abs_tol = 1e-12;
  double rk45_rel_tol = 1e-12;
  std::size_t max_steps = 10'000'000;
};

inline constexpr int kTrackedHamiltonians = 5;

struct Sample {
  std::size_t step = 0;
  Complex t;
  PhaseState state;
  double drift = 0.0;  // max_i |b_i^T a_i - 1|
  std::array<Complex, kTrackedHamiltonians> hamiltonians{};
};

struct Trajectory {
  int m = 0;
  std::vector<Sample> samples;
};

/// Integrates along the straight segment 0 -> spec.t_final. The first and the final
/// states are always recorded. Throws CollidingPoles carrying the breakdown time,
/// StepLimitExceeded, or std::invalid_argument for a malformed spec.
Trajectory integrate(const PhaseState& state, const FlowSpec& spec, const Tolerances& tol = {});

/// Final state of integrate(), without recording intermediate samples.
PhaseState flow(const PhaseState& state, const FlowSpec& spec, const Tolerances& tol = {});

/// max-entry residual |dL/dt - [M, L]| at every sample of a t_2 trajectory, with dL/dt
/// from five-point fourth-order differences over the (uniformly spaced) samples.
/// Throws InsufficientSamples for fewer than five samples.
std::vector<double> check_lax(const Trajectory& trajectory, const Tolerances& tol = {});

/// Observables that do not depend on the gauge representative: x and p in a canonical
/// (lexicographic in x) order, H_1..H_5, tr R^k for k = 1..5 and the products a_i b_i^T.
std::vector<Complex> gauge_invariant_observables(const PhaseState& state,
                                                 const Tolerances& tol = {});

struct CommutativityOptions {
  Method method = Method::RK4;
  FieldRoute route = FieldRoute::Gradient;
};

/// Max distance between the observables of flow_{m2}(s2) o flow_{m1}(s1) and
/// flow_{m1}(s1) o flow_{m2}(s2).
double commutativity_check(const PhaseState& state, int m1, int m2, Complex s1, Complex s2,
                           double dt, const CommutativityOptions& options = {},
                           const Tolerances& tol = {});

}  // namespace spincm
