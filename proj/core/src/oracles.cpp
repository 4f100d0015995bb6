#include "spincm/oracles.hpp"

#include "spincm/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace spincm::oracle {

CMatrix contour_residue(const CMatrix& L, int m, const std::optional<CMatrix>& A,
                        const ContourOptions& options) {
  if (options.nodes < 1) throw std::invalid_argument("contour_residue: nodes must be >= 1");
  const auto n = L.rows();
  const double norm_inf = L.cwiseAbs().rowwise().sum().maxCoeff();
  const double radius = options.radius_factor * (norm_inf + 1.0);
  const CMatrix I = CMatrix::Identity(n, n);

  CMatrix sum = CMatrix::Zero(n, n);
  for (int j = 0; j < options.nodes; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / options.nodes;
    const Complex z = std::polar(radius, theta);
    const CMatrix G = (z * I - L).partialPivLu().inverse();
    const CMatrix f = A ? CMatrix(G * (*A) * G) : G;
    // dz = i z dtheta, so (1/2 pi i) \oint g dz is the mean of g(z_j) z_j.
    sum += std::pow(z, m + 1) * f;
  }
  return sum / static_cast<double>(options.nodes);
}

Gradient fd_gradient(const PhaseState& state, int m, double h, Axis axis, const Tolerances& tol) {
  const Complex step = axis == Axis::Real ? Complex{h, 0.0} : Complex{0.0, h};
  auto central = [&](auto&& perturb) {
    PhaseState plus = state;
    PhaseState minus = state;
    perturb(plus, step);
    perturb(minus, -step);
    return (hamiltonian(plus, m, tol) - hamiltonian(minus, m, tol)) / (2.0 * step);
  };

  const auto n = state.x.size();
  const auto spin = state.a.cols();
  Gradient g{CVector(n), CVector(n), CMatrix(n, spin), CMatrix(n, spin)};
  for (Eigen::Index i = 0; i < n; ++i) {
    g.dx[i] = central([i](PhaseState& s, Complex d) { s.x[i] += d; });
    g.dp[i] = central([i](PhaseState& s, Complex d) { s.p[i] += d; });
    for (Eigen::Index alpha = 0; alpha < spin; ++alpha) {
      g.da(i, alpha) = central([i, alpha](PhaseState& s, Complex d) { s.a(i, alpha) += d; });
      g.db(i, alpha) = central([i, alpha](PhaseState& s, Complex d) { s.b(i, alpha) += d; });
    }
  }
  return g;
}

CVector scalar_calogero_positions(const CVector& x0, const CVector& p0, Complex t_final,
                                  double tolerance) {
  if (x0.size() != p0.size()) throw DimensionMismatch("scalar_calogero: x and p sizes differ");
  const auto n = x0.size();
  const double length = std::abs(t_final);
  if (length == 0.0) return x0;
  const Complex direction = t_final / length;

  // Packed as (x_1..x_n, v_1..v_n), each complex as (re, im).
  using State = std::vector<double>;
  State y(4 * static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex v = 2.0 * p0[i];
    y[2 * i] = x0[i].real();
    y[2 * i + 1] = x0[i].imag();
    y[2 * (n + i)] = v.real();
    y[2 * (n + i) + 1] = v.imag();
  }
  auto rhs = [&](const State& s, State& ds, double) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex xi{s[2 * i], s[2 * i + 1]};
      const Complex vi{s[2 * (n + i)], s[2 * (n + i) + 1]};
      Complex acc{};
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i) continue;
        const Complex d = xi - Complex{s[2 * k], s[2 * k + 1]};
        acc -= 8.0 / (d * d * d);
      }
      const Complex dx = direction * vi;
      const Complex dv = direction * acc;
      ds[2 * i] = dx.real();
      ds[2 * i + 1] = dx.imag();
      ds[2 * (n + i)] = dv.real();
      ds[2 * (n + i) + 1] = dv.imag();
    }
  };
  namespace odeint = boost::numeric::odeint;
  odeint::integrate_adaptive(
      odeint::make_controlled(tolerance, tolerance, odeint::runge_kutta_fehlberg78<State>()), rhs,
      y, 0.0, length, length / 1000.0);

  CVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = Complex{y[2 * i], y[2 * i + 1]};
  return out;
}

}  // namespace spincm::oracle
