// Acceptance criteria, one line each. With an argument only that criterion runs.
// Exit status is the number of failed criteria.

#include "spincm/errors.hpp"
#include "spincm/flows.hpp"
#include "spincm/kp.hpp"
#include "spincm/lax.hpp"
#include "spincm/oracles.hpp"
#include "spincm/phase.hpp"
#include "spincm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace spincm;

namespace {

struct Outcome {
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double rel(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / std::max(1.0, max_abs(b)); }

// Well-separated instances for the integration criteria.
constexpr int kParticles = 3;
constexpr int kSpin = 2;
constexpr std::uint64_t kFirstSeed = 1;
constexpr std::uint64_t kLastSeed = 10;

int particles_for(std::uint64_t seed) { return 1 + static_cast<int>(seed % 5); }
int spin_for(std::uint64_t seed) { return 1 + static_cast<int>((seed / 5) % 3); }

Outcome r_identity() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const PhaseState s = random_state(particles_for(seed), spin_for(seed), seed);
    const LaxData lax = build_lax(s);
    const auto n = s.n_particles();
    worst = std::max(worst, max_abs(lax.R - CMatrix::Identity(n, n) - (lax.L * lax.X - lax.X * lax.L)));
  }
  return {worst, 1e-12, worst <= 1e-12, "100 instances"};
}

Outcome hamiltonian_consistency() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const PhaseState s = random_state(particles_for(seed), spin_for(seed), seed);
    const LaxData lax = build_lax(s);
    const Complex h2 = (lax.L * lax.L).trace();
    worst = std::max(worst, std::abs(h2 - pair_hamiltonian(s)) / std::max(1.0, std::abs(h2)));
    for (int m = 1; m <= 5; ++m) {
      const CMatrix Lm = matrix_power(lax.L, m);
      const Complex hm = Lm.trace();
      worst = std::max(worst, std::abs((Lm * lax.R).trace() - hm) / std::max(1.0, std::abs(hm)));
    }
  }
  return {worst, 1e-12, worst <= 1e-12, "100 instances, m <= 5"};
}

Outcome gradient() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    for (int m = 1; m <= 4; ++m) {
      const Gradient an = grad_hamiltonian(s, m);
      const Gradient fd = oracle::fd_gradient(s, m, 1e-5);
      worst = std::max({worst, rel(fd.dx, an.dx), rel(fd.dp, an.dp), rel(fd.da, an.da),
                        rel(fd.db, an.db)});
    }
  }
  return {worst, 1e-6, worst <= 1e-6, "20 instances, m <= 4, h = 1e-5"};
}

Outcome involution() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    std::vector<Gradient> g;
    for (int m = 1; m <= 4; ++m) g.push_back(grad_hamiltonian(s, m));
    const auto h = hamiltonians(s, 4);
    for (int m = 1; m <= 4; ++m) {
      for (int k = m + 1; k <= 4; ++k) {
        const auto mi = static_cast<std::size_t>(m - 1), ki = static_cast<std::size_t>(k - 1);
        const double scale = std::sqrt(1.0 + std::abs(h[mi] * h[ki]));
        worst = std::max(worst, std::abs(poisson_bracket(g[mi], g[ki])) / scale);
      }
    }
  }
  return {worst, 1e-8, worst <= 1e-8, "20 instances, |{H_m,H_k}| / sqrt(1+|H_m H_k|)"};
}

Outcome dual_derivation() {
  double raw = 0.0, x_only = 0.0, mod_gauge = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    for (int m = 1; m <= 4; ++m) {
      const Tangent g = vector_field_gradient(s, m);
      const Tangent r = vector_field_residue(s, m);
      const Tangent mu = gauge_direction(s, m);
      const double scale =
          std::max({1.0, max_abs(g.x), max_abs(g.a), max_abs(g.b)});
      const double dx = max_abs(r.x - g.x) / scale;
      x_only = std::max(x_only, dx);
      raw = std::max({raw, dx, max_abs(r.a - g.a) / scale, max_abs(r.b - g.b) / scale});
      mod_gauge = std::max({mod_gauge, dx, max_abs(r.a - g.a - mu.a) / scale,
                            max_abs(r.b - g.b - mu.b) / scale});
    }
  }
  char note[160];
  std::snprintf(note, sizeof note, "x' alone %.2e, spins modulo gauge rescaling %.2e", x_only,
                mod_gauge);
  return {raw, 1e-12, raw <= 1e-12, note};
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

Outcome lax_residual() {
  double worst = 0.0;
  double worst_ratio_gap = 0.0;
  double ratio_lo = 1e300, ratio_hi = 0.0;
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    FlowSpec spec;
    spec.t_final = 1.0;
    spec.dt = 1e-3;
    spec.record_every = 1;
    worst = std::max(worst, max_of(check_lax(integrate(s, spec))));

    spec.t_final = 0.2;
    spec.dt = 0.02;
    const double coarse = max_of(check_lax(integrate(s, spec)));
    spec.dt = 0.01;
    const double fine = max_of(check_lax(integrate(s, spec)));
    const double ratio = coarse / fine;
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
    worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 16.0));
  }
  const bool shrink = worst_ratio_gap <= 4.0;
  char note[160];
  std::snprintf(note, sizeof note, "dt 0.02 -> 0.01 shrink ratio in [%.2f, %.2f], need 16 +- 4",
                ratio_lo, ratio_hi);
  return {worst, 1e-7, worst <= 1e-7 && shrink, note};
}

Outcome conservation() {
  double worst_h = 0.0, worst_drift = 0.0;
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    for (int m : {2, 3}) {
      FlowSpec spec;
      spec.m = m;
      spec.record_every = 100;
      const Trajectory tr = integrate(s, spec);
      const auto& h0 = tr.samples.front().hamiltonians;
      for (const auto& sample : tr.samples) {
        for (std::size_t k = 0; k < h0.size(); ++k) {
          worst_h = std::max(worst_h, std::abs(sample.hamiltonians[k] - h0[k]) /
                                          std::max(1.0, std::abs(h0[k])));
        }
        worst_drift = std::max(worst_drift, sample.drift);
      }
    }
  }
  char note[160];
  std::snprintf(note, sizeof note, "H_1..H_5 over T = 1, m = 2,3; constraint drift %.2e <= 1e-9",
                worst_drift);
  return {worst_h, 1e-8, worst_h <= 1e-8 && worst_drift <= 1e-9, note};
}

Outcome commutativity() {
  double worst = 0.0;
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    worst = std::max(worst, commutativity_check(s, 2, 3, 0.1, 0.1, 1e-3));
  }
  return {worst, 1e-6, worst <= 1e-6, "t_2 / t_3 at s = 0.1, dt = 1e-3"};
}

Outcome linear_problem() {
  double worst = 0.0;
  double ratio_lo = 1e300, ratio_hi = 0.0;
  const Complex z{1.3, 0.7};
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    const auto grid = default_x_grid(s, 20);
    const auto r1 = linear_problem_residual(s, z, grid, 1e-4);
    const auto r2 = linear_problem_residual(s, z, grid, 5e-5);
    worst = std::max(worst, r1.max());
    for (double ratio : {r1.psi / r2.psi, r1.psi_dagger / r2.psi_dagger}) {
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
    }
  }
  const bool order = ratio_lo >= 3.5 && ratio_hi <= 4.5;
  char note[160];
  std::snprintf(note, sizeof note, "psi and adjoint; halving ratio in [%.3f, %.3f], need 4 +- 0.5",
                ratio_lo, ratio_hi);
  return {worst, 1e-6, worst <= 1e-6 && order, note};
}

Outcome residue_identity() {
  double worst = 0.0, worst_pole = 0.0;
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    const auto grid = default_x_grid(s, 20);
    for (int m = 1; m <= 3; ++m) {
      const auto r = residue_identity_residual(s, m, grid);
      worst = std::max({worst, r.entrywise, r.trace});
      worst_pole = std::max(worst_pole, r.first_order_pole);
    }
  }
  char note[160];
  std::snprintf(note, sizeof note, "m <= 3; first-order pole trace %.2e <= 1e-10", worst_pole);
  return {worst, 1e-10, worst <= 1e-10 && worst_pole <= 1e-10, note};
}

Outcome n1_reduction() {
  double worst = 0.0;
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, 1, seed);
    FlowSpec spec;
    spec.t_final = 0.5;
    spec.method = Method::RK45;
    spec.rk45_abs_tol = 1e-13;
    spec.rk45_rel_tol = 1e-13;
    const Trajectory tr = integrate(s, spec);
    for (const auto& sample : tr.samples) {
      const CVector ref = oracle::scalar_calogero_positions(s.x, s.p, sample.t);
      worst = std::max(worst, max_abs(sample.state.x - ref));
    }
  }
  return {worst, 1e-10, worst <= 1e-10, "N = 1 vs rational Calogero-Moser, T = 0.5"};
}

Outcome t1_shift() {
  double worst = 0.0;
  for (std::uint64_t seed = kFirstSeed; seed <= kLastSeed; ++seed) {
    const PhaseState s = random_state(kParticles, kSpin, seed);
    for (const Complex shift : {Complex{0.3, 0.0}, Complex{-0.7, 0.4}}) {
      FlowSpec spec;
      spec.m = 1;
      spec.t_final = shift;
      const PhaseState f = flow(s, spec);
      worst = std::max({worst, max_abs(f.x - (s.x.array() - shift).matrix()), max_abs(f.p - s.p),
                        max_abs(f.a - s.a), max_abs(f.b - s.b)});
    }
  }
  return {worst, 1e-12, worst <= 1e-12, "x -> x - s, (p, a, b) fixed"};
}

Outcome contour_oracle() {
  double worst = 0.0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto draw = [&](int n) {
    CMatrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = Complex{u(rng), u(rng)};
    return m;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    const int m = trial % 6;
    const CMatrix L = draw(n);
    const CMatrix A = draw(n);
    worst = std::max(worst, rel(oracle::contour_residue(L, m, A), resolvent_residue(L, m, A)));
    worst = std::max(worst, rel(oracle::contour_residue(L, m), resolvent_residue(L, m)));
  }
  return {worst, 1e-10, worst <= 1e-10, "50 (L, A, m <= 5) triples, 256 nodes"};
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"R-identity", r_identity},
      {"Hamiltonian consistency", hamiltonian_consistency},
      {"gradient vs finite differences", gradient},
      {"involution", involution},
      {"dual derivation", dual_derivation},
      {"Lax residual", lax_residual},
      {"conservation and constraint", conservation},
      {"flow commutativity", commutativity},
      {"linear problem", linear_problem},
      {"residue identity", residue_identity},
      {"N=1 reduction", n1_reduction},
      {"t_1 shift", t1_shift},
      {"contour oracle", contour_oracle},
  };

  int failed = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    if (only != 0 && id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.measured = std::nan("");
      o.note = std::string("error: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%-4s %2d %-32s %.3e <= %.0e  (%.1fs)  %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.measured, o.threshold, secs, o.note.c_str());
  }
  if (only == 0) {
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
  }
  return failed;
}
