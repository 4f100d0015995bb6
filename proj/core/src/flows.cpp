#include "spincm/flows.hpp"

#include "spincm/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace spincm {

namespace odeint = boost::numeric::odeint;

Tangent vector_field_gradient(const PhaseState& state, int m, const Tolerances& tol) {
  const Gradient g = grad_hamiltonian(state, m, tol);
  return Tangent{g.dp, -g.dx, g.db, -g.da};
}

Tangent vector_field_residue(const PhaseState& state, int m, const Tolerances& tol) {
  if (m < 1) throw std::invalid_argument("vector_field_residue: m must be >= 1");
  const LaxData lax = build_lax(state, tol);
  const auto n = state.x.size();

  const CMatrix single = resolvent_residue(lax.L, m);         // res z^m (zI-L)^-1
  const CMatrix dbl = resolvent_residue(lax.L, m, lax.R);     // res z^m (zI-L)^-1 R (zI-L)^-1

  Tangent t;
  // res z^m c_i . c*_i with c = -(zI-L)^-1 b, c* = (zI-L)^-T a.
  t.x = -dbl.diagonal();
  // res z^m c*_i = sum_k (L^m)_ki a_k, res z^m c_i = -sum_k (L^m)_ik b_k,
  // res z^m (c_k . c*_i) = -S_ki.
  t.a = single.transpose() * state.a;
  t.b = -single * state.b;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const Complex inv = 1.0 / (state.x[i] - state.x[k]);
      t.a.row(i) -= dbl(k, i) * inv * state.a.row(k);
      t.b.row(i) -= dbl(i, k) * inv * state.b.row(k);
    }
  }
  t.p = -grad_hamiltonian(state, m, tol).dx;
  return t;
}

Tangent gauge_direction(const PhaseState& state, int m, const Tolerances& tol) {
  const LaxData lax = build_lax(state, tol);
  const CVector mu = matrix_power(lax.L, m).diagonal();
  const auto n = state.x.size();
  Tangent t{CVector::Zero(n), CVector::Zero(n), mu.asDiagonal() * state.a,
            -(mu.asDiagonal() * state.b)};
  return t;
}

std::vector<CMatrix> spin_product_rates(const PhaseState& state, const Tangent& tangent) {
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(state.x.size()));
  for (Eigen::Index i = 0; i < state.x.size(); ++i) {
    out.push_back(tangent.a.row(i).transpose() * state.b.row(i) +
                  state.a.row(i).transpose() * tangent.b.row(i));
  }
  return out;
}

namespace {

using Packed = std::vector<double>;

std::size_t packed_size(const PhaseState& s) {
  return 2 * static_cast<std::size_t>(s.x.size() + s.p.size() + s.a.size() + s.b.size());
}

template <typename Scalars>
void put(const Scalars& values, Packed& out, std::size_t& pos) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out[pos++] = values(r, c).real();
      out[pos++] = values(r, c).imag();
    }
  }
}

template <typename Scalars>
void take(const Packed& in, Scalars& values, std::size_t& pos) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      values(r, c) = Complex{in[pos], in[pos + 1]};
      pos += 2;
    }
  }
}

void pack(const CVector& x, const CVector& p, const CMatrix& a, const CMatrix& b, Packed& out) {
  std::size_t pos = 0;
  put(x, out, pos);
  put(p, out, pos);
  put(a, out, pos);
  put(b, out, pos);
}

void unpack(const Packed& in, PhaseState& s) {
  std::size_t pos = 0;
  take(in, s.x, pos);
  take(in, s.p, pos);
  take(in, s.a, pos);
  take(in, s.b, pos);
}

/// d(state)/ds along the segment t = direction * s.
struct SegmentSystem {
  PhaseState scratch;
  int m;
  Complex direction;
  FieldRoute route;
  Tolerances tol;

  void operator()(const Packed& y, Packed& dyds, double /*s*/) {
    unpack(y, scratch);
    const Tangent t = route == FieldRoute::Gradient ? vector_field_gradient(scratch, m, tol)
                                                    : vector_field_residue(scratch, m, tol);
    pack(direction * t.x, direction * t.p, direction * t.a, direction * t.b, dyds);
  }
};

Sample make_sample(std::size_t step, Complex t, const PhaseState& state, const Tolerances& tol) {
  Sample s;
  s.step = step;
  s.t = t;
  s.state = state;
  s.drift = constraint_drift(state);
  const auto h = hamiltonians(state, kTrackedHamiltonians, tol);
  std::copy(h.begin(), h.end(), s.hamiltonians.begin());
  return s;
}

void check_spec(const FlowSpec& spec) {
  if (spec.m < 1) throw std::invalid_argument("flow spec: m must be >= 1");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) {
    throw std::invalid_argument("flow spec: dt must be positive");
  }
  if (spec.record_every < 1) throw std::invalid_argument("flow spec: record_every must be >= 1");
  if (!std::isfinite(spec.t_final.real()) || !std::isfinite(spec.t_final.imag())) {
    throw std::invalid_argument("flow spec: t_final must be finite");
  }
}

template <typename Body>
void with_breakdown_time(Complex t, Body&& body) {
  try {
    body();
  } catch (const CollidingPoles& e) {
    std::ostringstream msg;
    msg << "poles collide during flow near t = " << t << " (separation " << e.separation() << ")";
    throw CollidingPoles(msg.str(), e.separation(), t);
  }
}

}  // namespace

Trajectory integrate(const PhaseState& state, const FlowSpec& spec, const Tolerances& tol) {
  check_spec(spec);
  check_dimensions(state);
  check_separation(state, tol.collision);

  Trajectory traj;
  traj.m = spec.m;
  traj.samples.push_back(make_sample(0, Complex{}, state, tol));

  const double length = std::abs(spec.t_final);
  if (length == 0.0) return traj;
  const Complex direction = spec.t_final / length;

  SegmentSystem system{state, spec.m, direction, spec.route, tol};
  Packed y(packed_size(state));
  pack(state.x, state.p, state.a, state.b, y);
  PhaseState current = state;

  auto after_step = [&](std::size_t step, Complex t, bool last) {
    const CVector before = current.x;
    unpack(y, current);
    check_separation(current, tol.collision, t);
    // A step that moves a pole farther than the closest approach has jumped over a
    // collision rather than resolved it.
    const double sep = min_separation(current);
    const double moved = (current.x - before).cwiseAbs().maxCoeff();
    if (current.x.size() > 1 && moved > sep) {
      std::ostringstream msg;
      msg << "flow: poles at separation " << sep << " moved " << moved
          << " in one step near t = " << t;
      throw CollidingPoles(msg.str(), sep, t);
    }
    if (step % static_cast<std::size_t>(spec.record_every) == 0 || last) {
      traj.samples.push_back(make_sample(step, t, current, tol));
    }
  };

  if (spec.method == Method::RK4) {
    const double ratio = length / spec.dt;
    if (ratio > static_cast<double>(spec.max_steps)) {
      throw StepLimitExceeded("flow: |t_final| / dt exceeds the step limit");
    }
    // Snap near-integer ratios so that e.g. 1 / 1e-3 gives exactly 1000 steps.
    const double rounded = std::round(ratio);
    const auto steps = static_cast<std::size_t>(
        std::max(1.0, std::abs(ratio - rounded) < 1e-9 * std::max(1.0, ratio) ? rounded
                                                                               : std::ceil(ratio)));
    const double ds = length / static_cast<double>(steps);
    odeint::runge_kutta4<Packed> stepper;
    for (std::size_t k = 0; k < steps; ++k) {
      const double s = ds * static_cast<double>(k);
      with_breakdown_time(direction * s, [&] { stepper.do_step(system, y, s, ds); });
      const Complex t = spec.t_final * (static_cast<double>(k + 1) / static_cast<double>(steps));
      after_step(k + 1, t, k + 1 == steps);
    }
    return traj;
  }

  auto stepper = odeint::make_controlled(spec.rk45_abs_tol, spec.rk45_rel_tol,
                                         odeint::runge_kutta_dopri5<Packed>());
  double s = 0.0;
  double ds = std::min(spec.dt, length);
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  while (s < length) {
    if (++attempts > spec.max_steps) {
      throw StepLimitExceeded("flow: adaptive integration exceeded the step limit");
    }
    const bool clamp = s + ds >= length;
    if (clamp) ds = length - s;
    odeint::controlled_step_result result = odeint::fail;
    with_breakdown_time(direction * s, [&] { result = stepper.try_step(system, y, s, ds); });
    if (result == odeint::success) {
      ++accepted;
      const bool last = clamp || s >= length;
      if (last) s = length;
      after_step(accepted, last ? spec.t_final : direction * s, last);
    }
  }
  return traj;
}

PhaseState flow(const PhaseState& state, const FlowSpec& spec, const Tolerances& tol) {
  FlowSpec quiet = spec;
  quiet.record_every = static_cast<int>(std::min<std::size_t>(spec.max_steps, 1u << 30));
  return integrate(state, quiet, tol).samples.back().state;
}

std::vector<double> check_lax(const Trajectory& trajectory, const Tolerances& tol) {
  const auto& samples = trajectory.samples;
  if (trajectory.m != 2) {
    throw std::invalid_argument("check_lax: trajectory must follow the t_2 flow");
  }
  if (samples.size() < 5) {
    throw InsufficientSamples("check_lax: need at least five samples");
  }
  const Complex h = samples[1].t - samples[0].t;
  for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
    if (std::abs((samples[k + 1].t - samples[k].t) - h) > 1e-9 * std::abs(h)) {
      throw std::invalid_argument("check_lax: samples must be uniformly spaced in t");
    }
  }

  std::vector<LaxData> lax;
  lax.reserve(samples.size());
  for (const auto& s : samples) lax.push_back(build_lax(s.state, tol));
  const auto L = [&](std::size_t k) -> const CMatrix& { return lax[k].L; };

  const std::size_t last = samples.size() - 1;
  std::vector<double> residual(samples.size());
  for (std::size_t k = 0; k <= last; ++k) {
    CMatrix d;
    if (k == 0) {
      d = -25.0 * L(0) + 48.0 * L(1) - 36.0 * L(2) + 16.0 * L(3) - 3.0 * L(4);
    } else if (k == 1) {
      d = -3.0 * L(0) - 10.0 * L(1) + 18.0 * L(2) - 6.0 * L(3) + L(4);
    } else if (k == last) {
      d = 25.0 * L(k) - 48.0 * L(k - 1) + 36.0 * L(k - 2) - 16.0 * L(k - 3) + 3.0 * L(k - 4);
    } else if (k == last - 1) {
      d = 3.0 * L(k + 1) + 10.0 * L(k) - 18.0 * L(k - 1) + 6.0 * L(k - 2) - L(k - 3);
    } else {
      d = L(k - 2) - 8.0 * L(k - 1) + 8.0 * L(k + 1) - L(k + 2);
    }
    d /= 12.0 * h;
    const CMatrix& M = lax[k].M;
    residual[k] = (d - (M * L(k) - L(k) * M)).cwiseAbs().maxCoeff();
  }
  return residual;
}

std::vector<Complex> gauge_invariant_observables(const PhaseState& state, const Tolerances& tol) {
  const auto n = state.x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index k) {
    const Complex xi = state.x[i];
    const Complex xk = state.x[k];
    return xi.real() != xk.real() ? xi.real() < xk.real() : xi.imag() < xk.imag();
  });

  std::vector<Complex> out;
  for (auto i : order) out.push_back(state.x[i]);
  for (auto i : order) out.push_back(state.p[i]);
  for (const Complex h : hamiltonians(state, kTrackedHamiltonians, tol)) out.push_back(h);
  const CMatrix R = pairing_matrix(state);
  CMatrix power = R;
  for (int k = 1; k <= kTrackedHamiltonians; ++k) {
    out.push_back(power.trace());
    power = power * R;
  }
  for (auto i : order) {
    const CMatrix product = state.a.row(i).transpose() * state.b.row(i);
    out.insert(out.end(), product.data(), product.data() + product.size());
  }
  return out;
}

double commutativity_check(const PhaseState& state, int m1, int m2, Complex s1, Complex s2,
                           double dt, const CommutativityOptions& options, const Tolerances& tol) {
  if (m1 == m2) throw std::invalid_argument("commutativity_check: m1 and m2 must differ");
  auto run = [&](const PhaseState& from, int m, Complex s) {
    FlowSpec spec;
    spec.m = m;
    spec.t_final = s;
    spec.dt = dt;
    spec.method = options.method;
    spec.route = options.route;
    return flow(from, spec, tol);
  };
  const PhaseState first = run(run(state, m1, s1), m2, s2);
  const PhaseState second = run(run(state, m2, s2), m1, s1);
  const auto lhs = gauge_invariant_observables(first, tol);
  const auto rhs = gauge_invariant_observables(second, tol);
  double distance = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    distance = std::max(distance, std::abs(lhs[k] - rhs[k]));
  }
  return distance;
}

}  // namespace spincm
