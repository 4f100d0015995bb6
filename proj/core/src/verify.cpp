#include "spincm/verify.hpp"

#include "spincm/errors.hpp"
#include "spincm/flows.hpp"
#include "spincm/kp.hpp"
#include "spincm/lax.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

namespace spincm {

bool VerificationReport::ok() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Failed) return false;
  }
  return true;
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Passed:
      return "passed";
    case CheckStatus::Failed:
      return "failed";
    case CheckStatus::Skipped:
      return "skipped";
  }
  return "unknown";
}

std::vector<Complex> default_x_grid(const PhaseState& state, int count) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double top = -lo;
  for (Eigen::Index i = 0; i < state.x.size(); ++i) {
    lo = std::min(lo, state.x[i].real());
    hi = std::max(hi, state.x[i].real());
    top = std::max(top, state.x[i].imag());
  }
  lo -= 2.0;
  hi += 2.0;
  std::vector<Complex> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double s = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
    grid.emplace_back(lo + s * (hi - lo), top + 1.0);
  }
  return grid;
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << std::scientific << v;
  return out.str();
}

/// Outcome of one check body before thresholds are applied.
struct Measured {
  double residual = 0.0;
  std::map<std::string, std::string> details;
};

/// Flow trajectories shared between checks; an engaged error marks dependents skipped.
struct SharedFlow {
  int m = 0;
  std::optional<Trajectory> trajectory;
  std::string error;
};

double relative(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double max_rel(const CMatrix& computed, const CMatrix& reference) {
  return (computed - reference).cwiseAbs().maxCoeff() /
         std::max(1.0, reference.cwiseAbs().maxCoeff());
}

class SuiteRunner {
 public:
  SuiteRunner(const PhaseState& state, const SuiteConfig& config)
      : state_(state), config_(config), grid_(default_x_grid(state, config.grid_points)) {}

  std::vector<CheckResult> run() {
    add("constraint", config_.thresholds.constraint, [&] { return constraint(); });
    add("r_identity", config_.thresholds.r_identity, [&] { return r_identity(); });
    add("trace_identity", config_.thresholds.trace_identity, [&] { return trace_identity(); });
    add("gradient_fd", config_.thresholds.gradient_fd, [&] { return gradient_fd(); });
    add("involution", config_.thresholds.involution, [&] { return involution(); });
    add("dual_derivation", config_.thresholds.dual_derivation, [&] { return dual(false); });
    add("dual_derivation_mod_gauge", config_.thresholds.dual_derivation,
        [&] { return dual(true); });

    prepare_flows();
    add("lax_residual", config_.thresholds.lax_residual, [&] { return lax_residual(); });
    add("conservation", config_.thresholds.conservation, [&] { return conservation(); });
    add("commutativity", config_.thresholds.commutativity, [&] { return commutativity(); });
    add("constraint_drift", config_.thresholds.constraint_drift, [&] { return drift(); });

    add("rank_one_residues", config_.thresholds.rank_one, [&] { return rank_one(); });
    add("w1_v_consistency", config_.thresholds.w1_v_consistency, [&] { return w1_v(); });
    add("t1_shift", config_.thresholds.t1_shift, [&] { return t1_shift(); });
    add("linear_problem", config_.thresholds.linear_problem, [&] { return linear(false); });
    add("linear_problem_adjoint", config_.thresholds.linear_problem,
        [&] { return linear(true); });
    add("residue_identity", config_.thresholds.residue_identity,
        [&] { return residue_identity(); });
    add("first_order_pole", config_.thresholds.first_order_pole,
        [&] { return first_order_pole(); });
    if (state_.spin_dim() == 1) {
      add("n1_reduction", config_.thresholds.n1_reduction, [&] { return n1_reduction(); });
    }
    add("contour_oracle", config_.thresholds.contour_oracle, [&] { return contour_oracle(); });
    return std::move(results_);
  }

 private:
  struct Skip {
    std::string reason;
  };

  void add(const std::string& name, double threshold, const std::function<Measured()>& body) {
    CheckResult result;
    result.name = name;
    result.threshold = threshold;
    const auto start = std::chrono::steady_clock::now();
    try {
      Measured m = body();
      result.residual = m.residual;
      result.details = std::move(m.details);
      result.status = m.residual <= threshold ? CheckStatus::Passed : CheckStatus::Failed;
    } catch (const Skip& skip) {
      result.residual = std::numeric_limits<double>::quiet_NaN();
      result.status = CheckStatus::Skipped;
      result.details["skipped"] = skip.reason;
    } catch (const CollidingPoles& e) {
      result.residual = std::numeric_limits<double>::quiet_NaN();
      result.status = CheckStatus::Skipped;
      result.details["skipped"] = e.what();
    } catch (const std::exception& e) {
      result.residual = std::numeric_limits<double>::infinity();
      result.status = CheckStatus::Failed;
      result.details["error"] = e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results_.push_back(std::move(result));
  }

  Measured constraint() {
    check_dimensions(state_);
    return {constraint_drift(state_), {{"measure", "max_i |b_i^T a_i - 1|"}}};
  }

  Measured r_identity() {
    const LaxData lax = build_lax(state_, config_.tol);
    const auto n = lax.L.rows();
    const CMatrix rhs = CMatrix::Identity(n, n) + lax.L * lax.X - lax.X * lax.L;
    return {(lax.R - rhs).cwiseAbs().maxCoeff(), {{"measure", "max |R - I - [L, X]|"}}};
  }

  Measured trace_identity() {
    const LaxData lax = build_lax(state_, config_.tol);
    double worst = relative(matrix_power(lax.L, 2).trace(), pair_hamiltonian(state_));
    Measured out;
    out.details["pair_hamiltonian"] = fmt(worst);
    for (int m = 1; m <= config_.max_trace_order; ++m) {
      const CMatrix Lm = matrix_power(lax.L, m);
      worst = std::max(worst, relative((Lm * lax.R).trace(), Lm.trace()));
    }
    out.residual = worst;
    out.details["measure"] = "relative; tr L^2 vs pair form and tr(L^m R) vs tr L^m";
    out.details["max_m"] = std::to_string(config_.max_trace_order);
    return out;
  }

  Measured gradient_fd() {
    double worst = 0.0;
    for (int m = 1; m <= config_.max_order; ++m) {
      const Gradient g = grad_hamiltonian(state_, m, config_.tol);
      for (const auto axis : {oracle::Axis::Real, oracle::Axis::Imaginary}) {
        const Gradient fd = oracle::fd_gradient(state_, m, config_.fd_step, axis, config_.tol);
        auto cmp = [&](const auto& an, const auto& num) {
          for (Eigen::Index k = 0; k < an.size(); ++k) {
            const Complex a = an.data()[k];
            worst = std::max(worst, std::abs(a - num.data()[k]) / std::max(1.0, std::abs(a)));
          }
        };
        cmp(g.dx, fd.dx);
        cmp(g.dp, fd.dp);
        cmp(g.da, fd.da);
        cmp(g.db, fd.db);
      }
    }
    return {worst,
            {{"measure", "|fd - analytic| / max(1, |analytic|), real and imaginary steps"},
             {"h", fmt(config_.fd_step)},
             {"max_m", std::to_string(config_.max_order)}}};
  }

  Measured involution() {
    std::vector<Gradient> grads;
    std::vector<Complex> h = hamiltonians(state_, config_.max_order, config_.tol);
    for (int m = 1; m <= config_.max_order; ++m) {
      grads.push_back(grad_hamiltonian(state_, m, config_.tol));
    }
    double worst = 0.0;
    for (int m = 1; m <= config_.max_order; ++m) {
      for (int k = m + 1; k <= config_.max_order; ++k) {
        const Complex bracket = poisson_bracket(grads[m - 1], grads[k - 1]);
        worst = std::max(worst, std::abs(bracket) / std::sqrt(1.0 + std::abs(h[m - 1] * h[k - 1])));
      }
    }
    return {worst, {{"measure", "|{H_m, H_k}| / sqrt(1 + |H_m H_k|), 1 <= m < k"}}};
  }

  Measured dual(bool modulo_gauge) {
    double worst = 0.0;
    double worst_x = 0.0;
    for (int m = 1; m <= config_.max_order; ++m) {
      const Tangent g = vector_field_gradient(state_, m, config_.tol);
      Tangent r = vector_field_residue(state_, m, config_.tol);
      if (modulo_gauge) {
        const Tangent gauge = gauge_direction(state_, m, config_.tol);
        r.a -= gauge.a;
        r.b -= gauge.b;
      }
      const double scale = std::max(
          {1.0, g.x.cwiseAbs().maxCoeff(), g.a.cwiseAbs().maxCoeff(), g.b.cwiseAbs().maxCoeff()});
      const double dx = (r.x - g.x).cwiseAbs().maxCoeff() / scale;
      worst_x = std::max(worst_x, dx);
      worst = std::max({worst, dx, (r.a - g.a).cwiseAbs().maxCoeff() / scale,
                        (r.b - g.b).cwiseAbs().maxCoeff() / scale});
    }
    Measured out{worst, {}};
    out.details["measure"] = modulo_gauge
                                 ? "residue field minus (mu_i a_i, -mu_i b_i), mu_i = (L^m)_ii, "
                                   "vs gradient field on (x', a', b')"
                                 : "residue field vs gradient field on (x', a', b')";
    out.details["x_dot_only"] = fmt(worst_x);
    return out;
  }

  void prepare_flows() {
    for (const int m : config_.conserved_flows) {
      SharedFlow shared;
      shared.m = m;
      try {
        FlowSpec spec;
        spec.m = m;
        spec.t_final = config_.flow_time;
        spec.dt = config_.dt;
        shared.trajectory = integrate(state_, spec, config_.tol);
      } catch (const std::exception& e) {
        shared.error = e.what();
      }
      flows_.push_back(std::move(shared));
    }
  }

  const Trajectory& require_flow(int m) const {
    for (const auto& f : flows_) {
      if (f.m != m) continue;
      if (!f.trajectory) throw Skip{"t_" + std::to_string(m) + " flow failed: " + f.error};
      return *f.trajectory;
    }
    throw Skip{"t_" + std::to_string(m) + " flow not configured"};
  }

  Measured lax_residual() {
    const Trajectory& traj = require_flow(2);
    const std::vector<double> r = check_lax(traj, config_.tol);
    double worst = 0.0;
    for (const double v : r) worst = std::max(worst, v);
    return {worst, {{"dt", fmt(config_.dt)}, {"samples", std::to_string(r.size())}}};
  }

  Measured conservation() {
    double worst = 0.0;
    for (const int m : config_.conserved_flows) {
      const Trajectory& traj = require_flow(m);
      const auto& h0 = traj.samples.front().hamiltonians;
      for (const auto& s : traj.samples) {
        for (std::size_t k = 0; k < h0.size(); ++k) {
          worst = std::max(worst, std::abs(s.hamiltonians[k] - h0[k]) / (1.0 + std::abs(h0[k])));
        }
      }
    }
    return {worst,
            {{"measure", "max_t max_k |H_k(t) - H_k(0)| / (1 + |H_k(0)|)"},
             {"T", fmt(config_.flow_time)},
             {"dt", fmt(config_.dt)}}};
  }

  Measured drift() {
    double worst = 0.0;
    for (const int m : config_.conserved_flows) {
      for (const auto& s : require_flow(m).samples) worst = std::max(worst, s.drift);
    }
    return {worst, {{"measure", "max_t max_i |b_i^T a_i - 1|"}}};
  }

  Measured commutativity() {
    const double d = commutativity_check(state_, config_.commute_m1, config_.commute_m2,
                                         config_.commute_time, config_.commute_time, config_.dt,
                                         {}, config_.tol);
    return {d,
            {{"m1", std::to_string(config_.commute_m1)},
             {"m2", std::to_string(config_.commute_m2)},
             {"s", fmt(config_.commute_time)}}};
  }

  Measured rank_one() {
    const SpinorPair cs = solve_c(state_, config_.z, config_.tol);
    const int nodes = config_.residue_circle_nodes;
    double worst = 0.0;
    double w1_mismatch = 0.0;
    for (Eigen::Index i = 0; i < state_.x.size(); ++i) {
      const CMatrix psi = pole_residue(
          state_, i, [&](Complex x) { return psi_tilde_jet(state_, cs.c, x, config_.tol).value; },
          nodes);
      const CMatrix dag = pole_residue(
          state_, i,
          [&](Complex x) { return psi_dagger_tilde_jet(state_, cs.c_star, x, config_.tol).value; },
          nodes);
      for (const CMatrix* res : {&psi, &dag}) {
        const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(*res).singularValues();
        if (sv.size() > 1) worst = std::max(worst, sv[1] / sv[0]);
      }
      const CMatrix w = pole_residue(
          state_, i, [&](Complex x) { return w1(state_, x, config_.tol); }, nodes);
      const CMatrix expected = -(state_.a.row(i).transpose() * state_.b.row(i));
      w1_mismatch = std::max(w1_mismatch, max_rel(w, expected));
    }
    return {std::max(worst, w1_mismatch),
            {{"measure", "sigma_2 / sigma_1 of res psi, res psi_dagger; |res w1 + a_i b_i^T|"},
             {"sigma_ratio", fmt(worst)},
             {"w1_residue", fmt(w1_mismatch)}}};
  }

  Measured w1_v() {
    const double h = config_.w1_fd_step;
    double worst = 0.0;
    for (const Complex x : grid_) {
      const CMatrix fd = (w1(state_, x + h, config_.tol) - w1(state_, x - h, config_.tol)) / (2.0 * h);
      worst = std::max(worst, max_rel(fd, -0.5 * potential_v(state_, x, config_.tol)));
    }
    return {worst, {{"measure", "central difference of w1 vs -V/2"}, {"h", fmt(h)}}};
  }

  Measured t1_shift() {
    FlowSpec spec;
    spec.m = 1;
    spec.t_final = config_.shift_time;
    spec.dt = config_.dt;
    const PhaseState moved = flow(state_, spec, config_.tol);
    const double s = config_.shift_time;
    double worst = (moved.x - (state_.x.array() - s).matrix()).cwiseAbs().maxCoeff();
    worst = std::max(worst, (moved.p - state_.p).cwiseAbs().maxCoeff());
    worst = std::max(worst, (moved.a - state_.a).cwiseAbs().maxCoeff());
    worst = std::max(worst, (moved.b - state_.b).cwiseAbs().maxCoeff());
    double w_shift = 0.0;
    for (const Complex x : grid_) {
      w_shift = std::max(w_shift, max_rel(w1(moved, x, config_.tol), w1(state_, x + s, config_.tol)));
    }
    return {std::max(worst, w_shift),
            {{"s", fmt(s)}, {"coordinates", fmt(worst)}, {"w1_shift", fmt(w_shift)}}};
  }

  Measured linear(bool adjoint) {
    if (!linear_) {
      linear_ = linear_problem_residual(state_, config_.z, grid_, config_.dt2, config_.tol);
    }
    return {adjoint ? linear_->psi_dagger : linear_->psi,
            {{"dt2", fmt(config_.dt2)},
             {"z", "(" + fmt(config_.z.real()) + ", " + fmt(config_.z.imag()) + ")"},
             {"grid_points", std::to_string(grid_.size())}}};
  }

  const std::vector<ResidueIdentityResidual>& residues() {
    if (residues_.empty()) {
      for (int m = 1; m <= config_.residue_max_order; ++m) {
        residues_.push_back(residue_identity_residual(state_, m, grid_, config_.tol));
      }
    }
    return residues_;
  }

  Measured residue_identity() {
    double entry = 0.0;
    double trace = 0.0;
    for (const auto& r : residues()) {
      entry = std::max(entry, r.entrywise);
      trace = std::max(trace, r.trace);
    }
    return {std::max(entry, trace),
            {{"entrywise", fmt(entry)},
             {"trace", fmt(trace)},
             {"max_m", std::to_string(config_.residue_max_order)}}};
  }

  Measured first_order_pole() {
    double worst = 0.0;
    for (const auto& r : residues()) worst = std::max(worst, r.first_order_pole);
    return {worst, {{"measure", "max_i |tr of the simple-pole coefficient at x_i|"}}};
  }

  Measured n1_reduction() {
    FlowSpec spec;
    spec.m = 2;
    spec.t_final = config_.n1_time;
    spec.dt = config_.dt;
    const PhaseState spin = flow(state_, spec, config_.tol);
    const CVector scalar = oracle::scalar_calogero_positions(state_.x, state_.p, config_.n1_time);
    return {(spin.x - scalar).cwiseAbs().maxCoeff(), {{"T", fmt(config_.n1_time)}}};
  }

  Measured contour_oracle() {
    const LaxData lax = build_lax(state_, config_.tol);
    double worst = 0.0;
    for (int m = 0; m <= config_.max_trace_order; ++m) {
      worst = std::max(worst, max_rel(resolvent_residue(lax.L, m),
                                      oracle::contour_residue(lax.L, m, std::nullopt, config_.contour)));
      worst = std::max(worst, max_rel(resolvent_residue(lax.L, m, lax.R),
                                      oracle::contour_residue(lax.L, m, lax.R, config_.contour)));
    }
    return {worst,
            {{"nodes", std::to_string(config_.contour.nodes)},
             {"radius_factor", fmt(config_.contour.radius_factor)}}};
  }

  const PhaseState& state_;
  const SuiteConfig& config_;
  std::vector<Complex> grid_;
  std::vector<SharedFlow> flows_;
  std::optional<LinearProblemResidual> linear_;
  std::vector<ResidueIdentityResidual> residues_;
  std::vector<CheckResult> results_;
};

}  // namespace

VerificationReport run_suite(const PhaseState& state, const SuiteConfig& config,
                             std::optional<std::uint64_t> seed) {
  VerificationReport report;
  report.instance.seed = seed;
  report.instance.n_particles = state.n_particles();
  report.instance.spin_dim = state.spin_dim();
  report.checks = SuiteRunner(state, config).run();
  return report;
}

VerificationReport run_suite(int n_particles, int spin_dim, std::uint64_t seed,
                             const SuiteConfig& config, const RandomStateOptions& options) {
  return run_suite(random_state(n_particles, spin_dim, seed, options), config, seed);
}

std::string summary_table(const VerificationReport& report) {
  std::ostringstream out;
  out << "suite " << report.suite_version << "  particles=" << report.instance.n_particles
      << " spin=" << report.instance.spin_dim;
  if (report.instance.seed) out << " seed=" << *report.instance.seed;
  out << "\n";
  out << std::left << std::setw(28) << "check" << std::setw(9) << "status" << std::setw(15)
      << "residual" << std::setw(15) << "threshold" << "seconds\n";
  for (const auto& c : report.checks) {
    out << std::left << std::setw(28) << c.name << std::setw(9) << to_string(c.status)
        << std::setw(15) << fmt(c.residual) << std::setw(15) << fmt(c.threshold)
        << std::fixed << std::setprecision(3) << c.seconds << std::defaultfloat << "\n";
    for (const auto& [key, value] : c.details) {
      if (key == "error" || key == "skipped") out << "    " << key << ": " << value << "\n";
    }
  }
  out << (report.ok() ? "ALL CHECKS PASSED" : "SOME CHECKS FAILED") << "\n";
  return out.str();
}

}  // namespace spincm
