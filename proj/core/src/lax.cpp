#include "spincm/lax.hpp"

#include "spincm/errors.hpp"

#include <stdexcept>

namespace spincm {

namespace {

void require_order(int m, int min_order) {
  if (m < min_order) {
    throw std::invalid_argument("hierarchy index m out of range");
  }
}

}  // namespace

CMatrix pairing_matrix(const PhaseState& state) { return state.b * state.a.transpose(); }

LaxData build_lax(const PhaseState& state, const Tolerances& tol) {
  check_dimensions(state);
  check_separation(state, tol.collision);

  const auto n = state.x.size();
  LaxData lax;
  lax.R = pairing_matrix(state);
  lax.X = state.x.asDiagonal();
  lax.L = CMatrix::Zero(n, n);
  lax.M = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lax.L(i, i) = -state.p[i];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const Complex inv = 1.0 / (state.x[i] - state.x[k]);
      lax.L(i, k) = -lax.R(i, k) * inv;
      lax.M(i, k) = 2.0 * lax.R(i, k) * inv * inv;
    }
  }
  return lax;
}

CMatrix matrix_power(const CMatrix& L, int m) {
  require_order(m, 0);
  CMatrix out = CMatrix::Identity(L.rows(), L.cols());
  for (int j = 0; j < m; ++j) {
    out = out * L;
  }
  return out;
}

Complex hamiltonian(const PhaseState& state, int m, const Tolerances& tol) {
  require_order(m, 1);
  return matrix_power(build_lax(state, tol).L, m).trace();
}

std::vector<Complex> hamiltonians(const PhaseState& state, int count, const Tolerances& tol) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const CMatrix L = build_lax(state, tol).L;
  CMatrix power = L;
  for (int m = 1; m <= count; ++m) {
    out.push_back(power.trace());
    power = power * L;
  }
  return out;
}

Complex pair_hamiltonian(const PhaseState& state) {
  check_dimensions(state);
  const CMatrix R = pairing_matrix(state);
  Complex h = state.p.array().square().sum();
  const auto n = state.x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (i == k) continue;
      const Complex d = state.x[i] - state.x[k];
      h -= R(i, k) * R(k, i) / (d * d);
    }
  }
  return h;
}

Gradient grad_hamiltonian(const PhaseState& state, int m, const Tolerances& tol) {
  require_order(m, 1);
  const LaxData lax = build_lax(state, tol);
  const auto n = state.x.size();
  const auto spin = state.a.cols();

  // dH = tr(P dL) with P = m L^{m-1}, i.e. dH/dq = sum_{j,k} P_kj dL_jk/dq.
  const CMatrix P = static_cast<double>(m) * matrix_power(lax.L, m - 1);
  const CMatrix& R = lax.R;

  Gradient g;
  g.dp = -P.diagonal();
  g.dx = CVector::Zero(n);
  g.da = CMatrix::Zero(n, spin);
  g.db = CMatrix::Zero(n, spin);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const Complex inv = 1.0 / (state.x[i] - state.x[k]);
      // dL_ik/dx_i = R_ik/(x_i-x_k)^2 and dL_ki/dx_i = -R_ki/(x_i-x_k)^2.
      g.dx[i] += (P(k, i) * R(i, k) - P(i, k) * R(k, i)) * inv * inv;
      // dL_ki/da_i = -b_k/(x_k - x_i), dL_ik/db_i = -a_k/(x_i - x_k).
      g.da.row(i) += P(i, k) * inv * state.b.row(k);
      g.db.row(i) -= P(k, i) * inv * state.a.row(k);
    }
  }
  return g;
}

Complex poisson_bracket(const Gradient& f, const Gradient& g) {
  if (f.dx.size() != g.dx.size() || f.dp.size() != g.dp.size() || f.da.rows() != g.da.rows() ||
      f.da.cols() != g.da.cols() || f.db.rows() != g.db.rows() || f.db.cols() != g.db.cols() ||
      f.dx.size() != f.dp.size()) {
    throw DimensionMismatch("poisson_bracket: gradients taken at different shapes");
  }
  Complex sum = (f.dx.array() * g.dp.array() - f.dp.array() * g.dx.array()).sum();
  sum += (f.da.array() * g.db.array() - f.db.array() * g.da.array()).sum();
  return sum;
}

CMatrix resolvent_residue(const CMatrix& L, int m, const std::optional<CMatrix>& A) {
  require_order(m, 0);
  if (L.rows() != L.cols()) {
    throw DimensionMismatch("resolvent_residue: L must be square");
  }
  if (!A) {
    return matrix_power(L, m);
  }
  if (A->rows() != L.rows() || A->cols() != L.cols()) {
    throw DimensionMismatch("resolvent_residue: A must match L");
  }
  // Horner-like accumulation of sum_j L^j A L^{m-1-j}: S_{k+1} = L S_k + A L^k.
  CMatrix sum = CMatrix::Zero(L.rows(), L.cols());
  CMatrix right = CMatrix::Identity(L.rows(), L.cols());
  for (int k = 0; k < m; ++k) {
    sum = L * sum + (*A) * right;
    right = right * L;
  }
  return sum;
}

}  // namespace spincm
