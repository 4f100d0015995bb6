#pragma once

#include "spincm/flows.hpp"
#include "spincm/kp.hpp"
#include "spincm/phase.hpp"
#include "spincm/verify.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spincm::io {

/// Complex literal: "re", "re+imi", "re-imi" or "imi" (e.g. "1.3+0.7i", "-2e-3i").
/// Throws std::invalid_argument on malformed input.
Complex parse_complex(const std::string& text);

/// Shortest round-trip decimal representation, independent of the C++ locale.
std::string format_double(double v);

struct StateFile {
  PhaseState state;
  std::optional<TimeVector> times;
};

/// State files hold {"n_particles", "spin_dim", "x", "p", "a", "b", "times"?}, with every
/// complex number written as a two-element [re, im] array. Reading validates the state.
std::string state_to_json(const PhaseState& state, const std::optional<TimeVector>& times = {});
StateFile state_from_json(const std::string& text, const Tolerances& tol = {});
void write_state(const std::string& path, const PhaseState& state,
                 const std::optional<TimeVector>& times = {});
StateFile read_state(const std::string& path, const Tolerances& tol = {});

/// Header step,re_t,im_t,re_x_1,im_x_1,...,re_p_1,im_p_1,...,drift,re_H1,im_H1,...
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
std::string trajectory_to_json(const Trajectory& trajectory);

/// ba-eval output: {"z", "grid", "psi_tilde", "psi_dagger_tilde", "V", "w1"}; the matrix
/// fields are lists (one per grid point) of N x N matrices of [re, im] pairs.
std::string ba_eval_to_json(Complex z, const std::vector<Complex>& grid,
                            const std::vector<BASample>& samples, const std::vector<CMatrix>& V,
                            const std::vector<CMatrix>& w1_values);

std::string report_to_json(const VerificationReport& report);

/// Top-level configuration shared by the command-line tool.
struct Config {
  SuiteConfig suite;
  Method method = Method::RK4;
  int record_every = 1;
  std::string output_dir = ".";
};

/// Reads a JSON config; absent keys keep their defaults. Throws std::invalid_argument
/// for non-positive tolerances or unknown methods.
Config config_from_json(const std::string& text);
Config read_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace spincm::io
