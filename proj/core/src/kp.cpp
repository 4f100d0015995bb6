#include "spincm/kp.hpp"

#include "spincm/errors.hpp"
#include "spincm/flows.hpp"
#include "spincm/lax.hpp"

#include <cmath>
#include <sstream>

namespace spincm {

namespace {

/// diag(1/(x - x_i)^power), throwing PoleHit when x sits on a pole.
CVector inverse_distances(const PhaseState& state, Complex x, const Tolerances& tol) {
  CVector inv(state.x.size());
  for (Eigen::Index i = 0; i < state.x.size(); ++i) {
    const Complex d = x - state.x[i];
    if (std::abs(d) < tol.collision) {
      std::ostringstream msg;
      msg << "evaluation point " << x << " hits pole x_" << i + 1 << " = " << state.x[i];
      throw PoleHit(msg.str());
    }
    inv[i] = 1.0 / d;
  }
  return inv;
}

}  // namespace

SpinorPair solve_c(const PhaseState& state, Complex z, const Tolerances& tol) {
  const CMatrix L = build_lax(state, tol).L;
  const auto n = L.rows();
  const CMatrix shifted = z * CMatrix::Identity(n, n) - L;
  const Eigen::PartialPivLU<CMatrix> lu(shifted);
  const double rcond = lu.rcond();
  if (!(rcond > kSpectralRcondFloor)) {
    std::ostringstream msg;
    msg << "z = " << z << " is on the spectrum of L (rcond " << rcond << ")";
    throw SpectralCollision(msg.str(), rcond);
  }
  SpinorPair out;
  out.c = -lu.solve(state.b);
  out.c_star = lu.transpose().solve(state.a);
  return out;
}

PsiJet psi_tilde_jet(const PhaseState& state, const CMatrix& c, Complex x, const Tolerances& tol) {
  const CVector inv = inverse_distances(state, x, tol);
  const auto N = state.a.cols();
  const CVector inv2 = inv.cwiseProduct(inv);
  const CVector inv3 = inv2.cwiseProduct(inv);
  PsiJet jet;
  jet.value = CMatrix::Identity(N, N) + state.a.transpose() * inv.asDiagonal() * c;
  jet.dx = -(state.a.transpose() * inv2.asDiagonal() * c);
  jet.dxx = 2.0 * (state.a.transpose() * inv3.asDiagonal() * c);
  return jet;
}

PsiJet psi_dagger_tilde_jet(const PhaseState& state, const CMatrix& c_star, Complex x,
                            const Tolerances& tol) {
  const CVector inv = inverse_distances(state, x, tol);
  const auto N = state.b.cols();
  const CVector inv2 = inv.cwiseProduct(inv);
  const CVector inv3 = inv2.cwiseProduct(inv);
  PsiJet jet;
  jet.value = CMatrix::Identity(N, N) + c_star.transpose() * inv.asDiagonal() * state.b;
  jet.dx = -(c_star.transpose() * inv2.asDiagonal() * state.b);
  jet.dxx = 2.0 * (c_star.transpose() * inv3.asDiagonal() * state.b);
  return jet;
}

BASample psi_pair(const PhaseState& state, const TimeVector& times, Complex z, Complex x,
                  Gauge gauge, const Tolerances& tol) {
  // Check the evaluation point before the (more expensive) spectral solve.
  inverse_distances(state, x, tol);
  const SpinorPair cs = solve_c(state, z, tol);
  BASample sample;
  sample.z = z;
  sample.x = x;
  sample.gauge = gauge;
  sample.c = cs.c;
  sample.c_star = cs.c_star;
  sample.psi_tilde = psi_tilde_jet(state, cs.c, x, tol).value;
  sample.psi_dagger_tilde = psi_dagger_tilde_jet(state, cs.c_star, x, tol).value;
  if (gauge == Gauge::Full) {
    const Complex phase = x * z + times.xi(z);
    sample.psi_tilde *= std::exp(phase);
    sample.psi_dagger_tilde *= std::exp(-phase);
  }
  return sample;
}

CMatrix w1(const PhaseState& state, Complex x, const Tolerances& tol) {
  const CVector inv = inverse_distances(state, x, tol);
  return -(state.a.transpose() * inv.asDiagonal() * state.b);
}

CMatrix potential_v(const PhaseState& state, Complex x, const Tolerances& tol) {
  const CVector inv = inverse_distances(state, x, tol);
  return -2.0 * (state.a.transpose() * inv.cwiseProduct(inv).asDiagonal() * state.b);
}

Complex tau(std::span<const Complex> roots, const TauParams& params, Complex x) {
  Complex value = params.C * std::exp(params.A * x);
  for (const Complex r : roots) value *= (x - r);
  return value;
}

Complex tau(const PhaseState& state, const TauParams& params, Complex x) {
  return tau(std::span<const Complex>(state.x.data(), static_cast<std::size_t>(state.x.size())),
             params, x);
}

Complex dlog_tau_dx(std::span<const Complex> roots, const TauParams& params, Complex x) {
  Complex value = params.A;
  for (const Complex r : roots) value += 1.0 / (x - r);
  return value;
}

Complex dlog_tau_dx(const PhaseState& state, const TauParams& params, Complex x) {
  return dlog_tau_dx(
      std::span<const Complex>(state.x.data(), static_cast<std::size_t>(state.x.size())), params,
      x);
}

LinearProblemResidual linear_problem_residual(const PhaseState& state, Complex z,
                                              std::span<const Complex> x_grid, double dt2,
                                              const Tolerances& tol) {
  if (!(dt2 > 0.0)) throw std::invalid_argument("linear_problem_residual: dt2 must be positive");

  FlowSpec spec;
  spec.m = 2;
  spec.dt = dt2;
  spec.t_final = Complex{dt2, 0.0};
  const PhaseState forward = flow(state, spec, tol);
  spec.t_final = Complex{-dt2, 0.0};
  const PhaseState backward = flow(state, spec, tol);

  const SpinorPair centre = solve_c(state, z, tol);
  const SpinorPair plus = solve_c(forward, z, tol);
  const SpinorPair minus = solve_c(backward, z, tol);

  LinearProblemResidual out;
  for (const Complex x : x_grid) {
    const CMatrix V = potential_v(state, x, tol);

    const PsiJet psi = psi_tilde_jet(state, centre.c, x, tol);
    const CMatrix dpsi_dt = (psi_tilde_jet(forward, plus.c, x, tol).value -
                             psi_tilde_jet(backward, minus.c, x, tol).value) /
                            (2.0 * dt2);
    const CMatrix rhs = 2.0 * z * psi.dx + psi.dxx + V * psi.value;
    out.psi = std::max(out.psi, (dpsi_dt - rhs).cwiseAbs().maxCoeff());

    const PsiJet dag = psi_dagger_tilde_jet(state, centre.c_star, x, tol);
    const CMatrix ddag_dt = (psi_dagger_tilde_jet(forward, plus.c_star, x, tol).value -
                             psi_dagger_tilde_jet(backward, minus.c_star, x, tol).value) /
                            (2.0 * dt2);
    const CMatrix rhs_dag = -2.0 * z * dag.dx + dag.dxx + dag.value * V;
    out.psi_dagger = std::max(out.psi_dagger, (-ddag_dt - rhs_dag).cwiseAbs().maxCoeff());
  }
  return out;
}

namespace {

/// Residues at infinity that enter the product psi psi_dagger.
struct ProductResidues {
  CMatrix c_star;  // row i: res z^m c*_i = sum_k (L^m)_ki a_k
  CMatrix c;       // row i: res z^m c_i = -sum_k (L^m)_ik b_k
  CMatrix cross;   // (i, k): res z^m (c_i . c*_k) = -S_ik
};

ProductResidues product_residues(const PhaseState& state, int m, const Tolerances& tol) {
  if (m < 1) throw std::invalid_argument("residue identity: m must be >= 1");
  const LaxData lax = build_lax(state, tol);
  const CMatrix single = resolvent_residue(lax.L, m);
  const CMatrix dbl = resolvent_residue(lax.L, m, lax.R);
  return ProductResidues{single.transpose() * state.a, -single * state.b, -dbl};
}

CMatrix assemble_product(const PhaseState& state, const ProductResidues& r, const CVector& inv) {
  // The identity term contributes res z^m = 0 for m >= 1.
  return r.c_star.transpose() * inv.asDiagonal() * state.b +
         state.a.transpose() * inv.asDiagonal() * r.c +
         state.a.transpose() * inv.asDiagonal() * r.cross * inv.asDiagonal() * state.b;
}

CMatrix assemble_rate(const PhaseState& state, const Tangent& t, const CVector& inv) {
  const CVector inv2 = inv.cwiseProduct(inv);
  return t.a.transpose() * inv.asDiagonal() * state.b +
         state.a.transpose() * inv.asDiagonal() * t.b +
         state.a.transpose() * inv2.cwiseProduct(t.x).asDiagonal() * state.b;
}

}  // namespace

CMatrix residue_product(const PhaseState& state, int m, Complex x, const Tolerances& tol) {
  const CVector inv = inverse_distances(state, x, tol);
  return assemble_product(state, product_residues(state, m, tol), inv);
}

CMatrix w1_flow_rate(const PhaseState& state, int m, Complex x, const Tolerances& tol) {
  const CVector inv = inverse_distances(state, x, tol);
  return assemble_rate(state, vector_field_gradient(state, m, tol), inv);
}

ResidueIdentityResidual residue_identity_residual(const PhaseState& state, int m,
                                                  std::span<const Complex> x_samples,
                                                  const Tolerances& tol) {
  const ProductResidues r = product_residues(state, m, tol);
  const Tangent tangent = vector_field_gradient(state, m, tol);
  const CMatrix R = pairing_matrix(state);

  ResidueIdentityResidual out;
  for (const Complex x : x_samples) {
    const CVector inv = inverse_distances(state, x, tol);
    const CMatrix lhs = assemble_product(state, r, inv);
    const CMatrix rhs = assemble_rate(state, tangent, inv);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    out.entrywise = std::max(out.entrywise, (lhs - rhs).cwiseAbs().maxCoeff() / scale);

    // Trace form: d_tm d_x log tau = sum_i x'_i / (x - x_i)^2.
    const Complex log_tau_rate = (inv.cwiseProduct(inv).cwiseProduct(tangent.x)).sum();
    out.trace = std::max(out.trace, std::abs(lhs.trace() - log_tau_rate) /
                                        std::max(1.0, std::abs(log_tau_rate)));
  }

  // Simple-pole coefficient of the product at x_i; its trace is d_tm (b_i^T a_i).
  const auto n = state.x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex coefficient = (state.b.row(i).array() * r.c_star.row(i).array()).sum() +
                          (state.a.row(i).array() * r.c.row(i).array()).sum();
    double scale = std::abs(coefficient);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const Complex term =
          (r.cross(i, k) * R(k, i) + r.cross(k, i) * R(i, k)) / (state.x[i] - state.x[k]);
      coefficient += term;
      scale = std::max(scale, std::abs(term));
    }
    out.first_order_pole =
        std::max(out.first_order_pole, std::abs(coefficient) / std::max(1.0, scale));
  }
  return out;
}

}  // namespace spincm
