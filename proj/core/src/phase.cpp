#include "spincm/phase.hpp"

#include "spincm/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace spincm {

Complex TimeVector::xi(Complex z) const {
  Complex sum{0.0, 0.0};
  Complex zk = z;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    sum += t[k] * zk;
    zk *= z;
  }
  return sum;
}

void check_dimensions(const PhaseState& state) {
  const auto n = state.x.size();
  if (n < 1) {
    throw DimensionMismatch("phase state needs at least one particle");
  }
  if (state.p.size() != n || state.a.rows() != n || state.b.rows() != n) {
    throw DimensionMismatch("x, p, a, b must all have n_particles rows");
  }
  if (state.a.cols() < 1 || state.a.cols() != state.b.cols()) {
    throw DimensionMismatch("a and b must have the same spin dimension >= 1");
  }
}

double min_separation(const PhaseState& state) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = state.x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      best = std::min(best, std::abs(state.x[i] - state.x[k]));
    }
  }
  return best;
}

double constraint_drift(const PhaseState& state) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < state.x.size(); ++i) {
    const Complex pairing = (state.b.row(i).array() * state.a.row(i).array()).sum();
    worst = std::max(worst, std::abs(pairing - 1.0));
  }
  return worst;
}

void check_separation(const PhaseState& state, double eps, Complex time) {
  const double sep = min_separation(state);
  if (sep < eps) {
    std::ostringstream msg;
    msg << "poles collide: min separation " << sep << " < " << eps;
    if (time != Complex{}) msg << " at t = " << time;
    throw CollidingPoles(msg.str(), sep, time);
  }
}

void validate(const PhaseState& state, const Tolerances& tol) {
  check_dimensions(state);
  if (!state.x.allFinite() || !state.p.allFinite() || !state.a.allFinite() ||
      !state.b.allFinite()) {
    throw NonFiniteValue("phase state has non-finite entries");
  }
  check_separation(state, tol.collision);
  const double drift = constraint_drift(state);
  if (drift > tol.constraint) {
    std::ostringstream msg;
    msg << "constraint b_i^T a_i = 1 violated by " << drift;
    throw ConstraintViolated(msg.str(), drift);
  }
}

PhaseState make_state(CVector x, CVector p, CMatrix a, CMatrix b, const Tolerances& tol) {
  PhaseState state{std::move(x), std::move(p), std::move(a), std::move(b)};
  validate(state, tol);
  return state;
}

PhaseState random_state(int n_particles, int spin_dim, std::uint64_t seed,
                        const RandomStateOptions& options) {
  if (n_particles < 1 || spin_dim < 1) {
    throw DimensionMismatch("random_state needs n_particles >= 1 and spin_dim >= 1");
  }
  if (!(options.separation > 0.0)) {
    throw std::invalid_argument("random_state: separation must be positive");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto draw = [&](double box) { return Complex{box * unit(rng), box * unit(rng)}; };

  const double sep = options.separation;
  PhaseState state;
  state.x.resize(n_particles);
  state.p.resize(n_particles);
  state.a.resize(n_particles, spin_dim);
  state.b.resize(n_particles, spin_dim);

  // Lattice spacing 2*sep with jitter of at most sep/2 per coordinate keeps every
  // pair at least sep apart along the real axis.
  for (int i = 0; i < n_particles; ++i) {
    const double re = 2.0 * sep * i + 0.5 * sep * unit(rng);
    const double im = 0.5 * sep * unit(rng);
    state.x[i] = Complex{re, im};
  }
  for (int i = 0; i < n_particles; ++i) {
    state.p[i] = draw(options.momentum_box);
  }
  // a_i: box draw, then unit Euclidean norm (a gauge choice; the norm of a_i alone
  // carries no dynamics).
  for (int i = 0; i < n_particles; ++i) {
    double norm = 0.0;
    do {
      for (int alpha = 0; alpha < spin_dim; ++alpha) {
        state.a(i, alpha) = draw(options.spin_box);
      }
      norm = state.a.row(i).norm();
    } while (norm < 1e-8);
    state.a.row(i) /= norm;
  }
  // b_i: conj(a_i) plus box noise bounded so that |b_i^T a_i| >= 1 - spin_noise before
  // rescaling (Cauchy-Schwarz with |a_i| = 1).
  const double noise_scale = options.spin_noise / std::sqrt(2.0 * spin_dim);
  for (int i = 0; i < n_particles; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < options.max_retries && !accepted; ++attempt) {
      Eigen::RowVectorXcd bi(spin_dim);
      for (int alpha = 0; alpha < spin_dim; ++alpha) {
        bi[alpha] = std::conj(state.a(i, alpha)) + noise_scale * draw(1.0);
      }
      const Complex pairing = (bi.array() * state.a.row(i).array()).sum();
      if (std::abs(pairing) < options.pairing_floor) continue;
      state.b.row(i) = bi / pairing;
      accepted = true;
    }
    if (!accepted) {
      throw DegenerateDraw("random_state: no admissible b_i after retries");
    }
  }
  return state;
}

PhaseState gauge_rescale(const PhaseState& state, const CVector& lambda) {
  check_dimensions(state);
  if (lambda.size() != state.x.size()) {
    throw DimensionMismatch("gauge_rescale: lambda needs one entry per particle");
  }
  PhaseState out = state;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] == Complex{}) {
      throw ZeroScale("gauge_rescale: lambda_i must be nonzero");
    }
    out.a.row(i) *= lambda[i];
    out.b.row(i) /= lambda[i];
  }
  return out;
}

}  // namespace spincm
