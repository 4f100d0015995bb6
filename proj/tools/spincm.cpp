#include "spincm/errors.hpp"
#include "spincm/flows.hpp"
#include "spincm/io.hpp"
#include "spincm/kp.hpp"
#include "spincm/lax.hpp"
#include "spincm/phase.hpp"
#include "spincm/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace spincm;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
};

io::Config load_config(const Globals& g) {
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SPINCM_CONFIG")) path = env;
  }
  return path.empty() ? io::Config{} : io::read_config(path);
}

std::string fmt_complex(Complex z) {
  std::ostringstream out;
  out << io::format_double(z.real()) << (std::signbit(z.imag()) ? "-" : "+")
      << io::format_double(std::abs(z.imag())) << "i";
  return out.str();
}

void print_hamiltonians(const PhaseState& state, const Tolerances& tol) {
  const auto h = hamiltonians(state, kTrackedHamiltonians, tol);
  for (std::size_t k = 0; k < h.size(); ++k) {
    std::cout << "H" << k + 1 << " = " << fmt_complex(h[k]) << "\n";
  }
}

std::string out_path(const Globals& g, const io::Config& cfg, const std::string& fallback) {
  if (!g.out.empty()) return g.out;
  return (fs::path(cfg.output_dir) / fallback).string();
}

// "start:stop:count" with complex endpoints.
std::vector<Complex> parse_grid(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? first : spec.find(':', first + 1);
  if (second == std::string::npos) {
    throw CLI::ValidationError("--grid", "expected start:stop:count");
  }
  const Complex lo = io::parse_complex(spec.substr(0, first));
  const Complex hi = io::parse_complex(spec.substr(first + 1, second - first - 1));
  int count = 0;
  try {
    count = std::stoi(spec.substr(second + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid", "count must be an integer");
  }
  if (count < 1) throw CLI::ValidationError("--grid", "count must be positive");
  std::vector<Complex> grid;
  for (int k = 0; k < count; ++k) {
    const double s = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    grid.push_back(lo + s * (hi - lo));
  }
  return grid;
}

Complex complex_option(const std::string& text, const std::string& name) {
  try {
    return io::parse_complex(text);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(name, e.what());
  }
}

int cmd_gen(const Globals& g, int particles, int spin) {
  const io::Config cfg = load_config(g);
  const PhaseState state = random_state(particles, spin, g.seed);
  const std::string path = out_path(g, cfg, "state.json");
  io::write_state(path, state);
  std::cout << "wrote " << path << " (" << particles << " particles, spin " << spin << ", seed "
            << g.seed << ")\n";
  print_hamiltonians(state, cfg.suite.tol);
  return 0;
}

int cmd_evolve(const Globals& g, const std::string& state_path, int m, const std::string& t_text,
               std::optional<double> dt, std::optional<std::string> method_name, int record_every) {
  const io::Config cfg = load_config(g);
  const Complex t_final = complex_option(t_text, "--time");
  const io::StateFile input = io::read_state(state_path, cfg.suite.tol);

  FlowSpec spec;
  spec.m = m;
  spec.t_final = t_final;
  spec.dt = dt.value_or(cfg.suite.dt);
  spec.method = cfg.method;
  if (method_name) spec.method = *method_name == "rk45" ? Method::RK45 : Method::RK4;
  spec.record_every = record_every > 0 ? record_every : cfg.record_every;

  Trajectory traj;
  try {
    traj = integrate(input.state, spec, cfg.suite.tol);
  } catch (const CollidingPoles& e) {
    std::cerr << "error: poles collide at t = " << fmt_complex(e.time())
              << " (separation " << e.separation() << ")\n";
    return kRuntimeFailure;
  }

  const std::string stem = g.out.empty() ? (fs::path(cfg.output_dir) / "trajectory").string() : g.out;
  {
    std::ofstream csv(stem + ".csv");
    if (!csv) throw std::runtime_error("cannot open '" + stem + ".csv' for writing");
    io::write_trajectory_csv(csv, traj);
  }
  io::write_file(stem + ".json", io::trajectory_to_json(traj));

  const Sample& first = traj.samples.front();
  const Sample& last = traj.samples.back();
  double max_drift = 0.0;
  for (const auto& s : traj.samples) max_drift = std::max(max_drift, s.drift);
  std::cout << "flow t_" << m << " to t = " << fmt_complex(t_final) << ", " << last.step
            << " steps, " << traj.samples.size() << " samples -> " << stem << ".{csv,json}\n";
  for (std::size_t k = 0; k < first.hamiltonians.size(); ++k) {
    const Complex h0 = first.hamiltonians[k];
    const double change = std::abs(last.hamiltonians[k] - h0) / std::max(1.0, std::abs(h0));
    std::cout << "H" << k + 1 << " " << fmt_complex(h0) << "  relative change " << change << "\n";
  }
  std::cout << "max constraint drift " << max_drift << "\n";
  return 0;
}

int cmd_verify(const Globals& g, const std::string& state_path, int particles, int spin) {
  const io::Config cfg = load_config(g);
  VerificationReport report;
  if (!state_path.empty()) {
    report = run_suite(io::read_state(state_path, cfg.suite.tol).state, cfg.suite);
  } else {
    report = run_suite(particles, spin, g.seed, cfg.suite);
  }
  const std::string path = out_path(g, cfg, "report.json");
  io::write_file(path, io::report_to_json(report) + "\n");
  std::cout << summary_table(report);
  std::cout << "report written to " << path << "\n";
  return report.ok() ? 0 : kRuntimeFailure;
}

int cmd_ba_eval(const Globals& g, const std::string& state_path, const std::string& z_text,
                const std::string& grid_spec) {
  const io::Config cfg = load_config(g);
  const Complex z = complex_option(z_text, "--z");
  const io::StateFile input = io::read_state(state_path, cfg.suite.tol);
  const std::vector<Complex> grid = grid_spec.empty()
                                        ? default_x_grid(input.state, cfg.suite.grid_points)
                                        : parse_grid(grid_spec);
  const TimeVector times = input.times.value_or(TimeVector{});

  std::vector<BASample> samples;
  std::vector<CMatrix> v, w;
  try {
    for (const Complex x : grid) {
      samples.push_back(psi_pair(input.state, times, z, x, Gauge::Stripped, cfg.suite.tol));
      v.push_back(potential_v(input.state, x, cfg.suite.tol));
      w.push_back(w1(input.state, x, cfg.suite.tol));
    }
  } catch (const SpectralCollision& e) {
    std::cerr << "error: z = " << fmt_complex(z) << " lies on the spectrum of L (rcond "
              << e.rcond() << ")\n";
    return kRuntimeFailure;
  } catch (const PoleHit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  const std::string path = out_path(g, cfg, "ba.json");
  io::write_file(path, io::ba_eval_to_json(z, grid, samples, v, w) + "\n");
  std::cout << "evaluated " << grid.size() << " points at z = " << fmt_complex(z) << " -> " << path
            << "\n";
  return 0;
}

const CLI::Validator kAtLeastOne(
    [](std::string& text) -> std::string {
      try {
        if (std::stoi(text) >= 1) return {};
      } catch (const std::exception&) {
      }
      return "must be a positive integer, got '" + text + "'";
    },
    "INT>=1");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin Calogero-Moser hierarchy and rational matrix KP pole dynamics"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "JSON config (default: $SPINCM_CONFIG)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output file (evolve: path stem)");

  int particles = 3;
  int spin = 2;
  auto* gen = app.add_subcommand("gen", "draw a random phase-space point");
  gen->add_option("--particles,-n", particles, "number of particles")->check(kAtLeastOne);
  gen->add_option("--spin,-N", spin, "spin dimension")->check(kAtLeastOne);

  std::string state_path;
  int m = 2;
  std::string t_text = "1";
  std::optional<double> dt;
  std::optional<std::string> method;
  int record_every = 0;
  auto* evolve = app.add_subcommand("evolve", "integrate the t_m flow");
  evolve->add_option("state", state_path, "state file")->required()->check(CLI::ExistingFile);
  evolve->add_option("-m", m, "hierarchy index")->check(kAtLeastOne);
  evolve->add_option("--time,-T", t_text, "final complex time, e.g. 1 or 0.5+0.2i");
  evolve->add_option("--dt", dt, "step length")->check(CLI::PositiveNumber);
  evolve->add_option("--method", method, "rk4 or rk45")->check(CLI::IsMember({"rk4", "rk45"}));
  evolve->add_option("--record-every", record_every, "sample stride")
      ->check(kAtLeastOne);

  std::string verify_state;
  int v_particles = 3;
  int v_spin = 2;
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("state", verify_state, "state file (omit to generate from --seed)")
      ->check(CLI::ExistingFile);
  verify->add_option("--particles,-n", v_particles, "number of particles")
      ->check(kAtLeastOne);
  verify->add_option("--spin,-N", v_spin, "spin dimension")->check(kAtLeastOne);

  std::string ba_state;
  std::string z_text = "1.3+0.7i";
  std::string grid_spec;
  auto* ba = app.add_subcommand("ba-eval", "evaluate the Baker-Akhiezer pair on an x grid");
  ba->add_option("state", ba_state, "state file")->required()->check(CLI::ExistingFile);
  ba->add_option("--z", z_text, "spectral parameter");
  ba->add_option("--grid", grid_spec, "start:stop:count (default: a line above the poles)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen) return cmd_gen(g, particles, spin);
    if (*evolve) return cmd_evolve(g, state_path, m, t_text, dt, method, record_every);
    if (*verify) return cmd_verify(g, verify_state, v_particles, v_spin);
    if (*ba) return cmd_ba_eval(g, ba_state, z_text, grid_spec);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}
