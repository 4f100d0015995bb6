#pragma once

#include "spincm/oracles.hpp"
#include "spincm/phase.hpp"
#include "spincm/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spincm {

inline constexpr const char* kSuiteVersion = "spincm-suite/1";

enum class CheckStatus { Passed, Failed, Skipped };

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  CheckStatus status = CheckStatus::Skipped;
  std::map<std::string, std::string> details;
  double seconds = 0.0;

  bool passed() const { return status == CheckStatus::Passed; }
};

struct InstanceDescriptor {
  std::optional<std::uint64_t> seed;
  int n_particles = 0;
  int spin_dim = 0;
};

struct VerificationReport {
  InstanceDescriptor instance;
  std::string suite_version = kSuiteVersion;
  std::vector<CheckResult> checks;

  /// True iff every non-skipped check passed.
  bool ok() const;
  const CheckResult* find(const std::string& name) const;
};

/// Per-check acceptance thresholds. Scaled quantities are documented per check in
/// the report details.
struct Thresholds {
  double constraint = 1e-10;
  double r_identity = 1e-12;
  double trace_identity = 1e-12;
  double gradient_fd = 1e-6;
  double involution = 1e-8;
  double dual_derivation = 1e-12;
  double lax_residual = 1e-7;
  double conservation = 1e-8;
  double commutativity = 1e-6;
  double constraint_drift = 1e-9;
  double rank_one = 1e-12;
  double w1_v_consistency = 1e-6;
  double t1_shift = 1e-12;
  double linear_problem = 1e-6;
  double residue_identity = 1e-10;
  double first_order_pole = 1e-12;
  double n1_reduction = 1e-10;
  double contour_oracle = 1e-10;
};

struct SuiteConfig {
  Tolerances tol;
  Thresholds thresholds;

  int max_order = 4;           // m range of gradient, involution, dual-derivation checks
  int max_trace_order = 5;     // m range of tr(L^m R) = tr L^m
  double fd_step = 1e-5;
  double w1_fd_step = 1e-6;

  double dt = 1e-3;
  double flow_time = 1.0;
  std::vector<int> conserved_flows{2, 3};
  double commute_time = 0.1;
  int commute_m1 = 2;
  int commute_m2 = 3;
  double shift_time = 0.3;
  double n1_time = 0.5;

  Complex z{1.3, 0.7};
  int grid_points = 20;
  double dt2 = 1e-4;
  int residue_max_order = 3;

  oracle::ContourOptions contour;
  int residue_circle_nodes = 64;
};

/// Runs every enabled check in a fixed order. Errors inside a check become a failed
/// result; a collision during a flow the check depends on marks it skipped.
VerificationReport run_suite(const PhaseState& state, const SuiteConfig& config = {},
                             std::optional<std::uint64_t> seed = std::nullopt);

/// Generates random_state(n_particles, spin_dim, seed) and runs the suite on it.
VerificationReport run_suite(int n_particles, int spin_dim, std::uint64_t seed,
                             const SuiteConfig& config = {},
                             const RandomStateOptions& options = {});

/// Evaluation points for the KP checks: `count` points on a horizontal line one unit
/// above the highest pole, spanning the poles' real range with a margin of 2.
std::vector<Complex> default_x_grid(const PhaseState& state, int count);

/// Residue of a matrix-valued function of x at the pole x_i, by the trapezoid rule on a
/// circle of radius a quarter of the distance to the nearest other pole.
template <typename F>
CMatrix pole_residue(const PhaseState& state, Eigen::Index i, F&& f, int nodes);

std::string to_string(CheckStatus status);

/// Human-readable table, one line per check.
std::string summary_table(const VerificationReport& report);

}  // namespace spincm

#include "spincm/detail/pole_residue.inl"
