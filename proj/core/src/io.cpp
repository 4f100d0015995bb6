#include "spincm/io.hpp"

#include "spincm/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spincm::io {

using nlohmann::json;

namespace {

double parse_real(std::string_view text, const std::string& whole) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("malformed complex literal: '" + whole + "'");
  }
  return value;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument("complex values must be [re, im] arrays");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

json rows_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

CVector vector_from(const json& j, Eigen::Index expected, const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected) {
    throw DimensionMismatch(std::string("state file: '") + field + "' has the wrong length");
  }
  CVector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v[i] = complex_from(j[static_cast<std::size_t>(i)]);
  return v;
}

CMatrix rows_from(const json& j, Eigen::Index rows, Eigen::Index cols, const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw DimensionMismatch(std::string("state file: '") + field + "' needs one row per particle");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionMismatch(std::string("state file: '") + field + "' rows need spin_dim entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json state_object(const PhaseState& state) {
  return json{{"n_particles", state.n_particles()},
              {"spin_dim", state.spin_dim()},
              {"x", vector_json(state.x)},
              {"p", vector_json(state.p)},
              {"a", rows_json(state.a)},
              {"b", rows_json(state.b)}};
}

}  // namespace

Complex parse_complex(const std::string& text) {
  std::string s;
  for (const char ch : text) {
    if (ch != ' ') s.push_back(ch);
  }
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, text), 0.0};

  const std::string_view body(s.data(), s.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, text);
  };
  if (split == std::string_view::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split), text), imag_part(body.substr(split))};
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string state_to_json(const PhaseState& state, const std::optional<TimeVector>& times) {
  check_dimensions(state);
  json out = state_object(state);
  if (times) out["times"] = vector_json(times->t);
  return out.dump(2);
}

StateFile state_from_json(const std::string& text, const Tolerances& tol) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("state file is not valid JSON: ") + e.what());
  }
  for (const char* key : {"n_particles", "spin_dim", "x", "p", "a", "b"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("state file lacks '") + key + "'");
  }
  const auto n = j.at("n_particles").get<Eigen::Index>();
  const auto spin = j.at("spin_dim").get<Eigen::Index>();
  if (n < 1 || spin < 1) throw DimensionMismatch("state file: n_particles and spin_dim must be >= 1");

  StateFile file;
  file.state = make_state(vector_from(j["x"], n, "x"), vector_from(j["p"], n, "p"),
                          rows_from(j["a"], n, spin, "a"), rows_from(j["b"], n, spin, "b"), tol);
  if (j.contains("times")) {
    const json& t = j["times"];
    if (!t.is_array()) throw std::invalid_argument("state file: 'times' must be an array");
    file.times = TimeVector{vector_from(t, static_cast<Eigen::Index>(t.size()), "times")};
    if (!file.times->t.allFinite()) throw NonFiniteValue("state file: non-finite times");
  }
  return file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void write_state(const std::string& path, const PhaseState& state,
                 const std::optional<TimeVector>& times) {
  write_file(path, state_to_json(state, times) + "\n");
}

StateFile read_state(const std::string& path, const Tolerances& tol) {
  return state_from_json(read_file(path), tol);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  if (trajectory.samples.empty()) return;
  const auto n = trajectory.samples.front().state.x.size();
  out << "step,re_t,im_t";
  for (const char* name : {"x", "p"}) {
    for (Eigen::Index i = 1; i <= n; ++i) out << ",re_" << name << '_' << i << ",im_" << name << '_' << i;
  }
  out << ",drift";
  for (int k = 1; k <= kTrackedHamiltonians; ++k) out << ",re_H" << k << ",im_H" << k;
  out << '\n';

  auto put = [&](Complex z) { out << ',' << format_double(z.real()) << ',' << format_double(z.imag()); };
  for (const auto& s : trajectory.samples) {
    out << s.step;
    put(s.t);
    for (Eigen::Index i = 0; i < n; ++i) put(s.state.x[i]);
    for (Eigen::Index i = 0; i < n; ++i) put(s.state.p[i]);
    out << ',' << format_double(s.drift);
    for (const Complex h : s.hamiltonians) put(h);
    out << '\n';
  }
}

std::string trajectory_to_json(const Trajectory& trajectory) {
  json samples = json::array();
  for (const auto& s : trajectory.samples) {
    json h = json::array();
    for (const Complex v : s.hamiltonians) h.push_back(complex_json(v));
    samples.push_back(json{{"step", s.step},
                           {"t", complex_json(s.t)},
                           {"drift", s.drift},
                           {"hamiltonians", std::move(h)},
                           {"state", state_object(s.state)}});
  }
  return json{{"m", trajectory.m}, {"samples", std::move(samples)}}.dump(2);
}

std::string ba_eval_to_json(Complex z, const std::vector<Complex>& grid,
                            const std::vector<BASample>& samples, const std::vector<CMatrix>& V,
                            const std::vector<CMatrix>& w1_values) {
  json g = json::array();
  for (const Complex x : grid) g.push_back(complex_json(x));
  json psi = json::array();
  json dag = json::array();
  json v = json::array();
  json w = json::array();
  for (const auto& s : samples) {
    psi.push_back(rows_json(s.psi_tilde));
    dag.push_back(rows_json(s.psi_dagger_tilde));
  }
  for (const auto& m : V) v.push_back(rows_json(m));
  for (const auto& m : w1_values) w.push_back(rows_json(m));
  return json{{"z", complex_json(z)},
              {"grid", std::move(g)},
              {"psi_tilde", std::move(psi)},
              {"psi_dagger_tilde", std::move(dag)},
              {"V", std::move(v)},
              {"w1", std::move(w)}}
      .dump(2);
}

std::string report_to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    // JSON has no NaN/inf; skipped and errored residuals become null.
    json residual = std::isfinite(c.residual) ? json(c.residual) : json(nullptr);
    checks.push_back(json{{"name", c.name},
                          {"residual", residual},
                          {"threshold", c.threshold},
                          {"status", to_string(c.status)},
                          {"passed", c.passed()},
                          {"seconds", c.seconds},
                          {"details", c.details}});
  }
  json instance{{"n_particles", report.instance.n_particles},
                {"spin_dim", report.instance.spin_dim}};
  instance["seed"] = report.instance.seed ? json(*report.instance.seed) : json(nullptr);
  return json{{"suite_version", report.suite_version},
              {"instance", std::move(instance)},
              {"ok", report.ok()},
              {"checks", std::move(checks)}}
      .dump(2);
}

Config config_from_json(const std::string& text) {
  const json j = json::parse(text);
  Config cfg;
  auto& suite = cfg.suite;
  auto positive = [](const json& node, const char* key, double& target) {
    if (!node.contains(key)) return;
    const double v = node.at(key).get<double>();
    if (!(v > 0.0)) throw std::invalid_argument(std::string("config: '") + key + "' must be positive");
    target = v;
  };

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    positive(t, "collision", suite.tol.collision);
    positive(t, "constraint", suite.tol.constraint);
  }
  if (j.contains("thresholds")) {
    const json& t = j["thresholds"];
    auto& th = suite.thresholds;
    positive(t, "constraint", th.constraint);
    positive(t, "r_identity", th.r_identity);
    positive(t, "trace_identity", th.trace_identity);
    positive(t, "gradient_fd", th.gradient_fd);
    positive(t, "involution", th.involution);
    positive(t, "dual_derivation", th.dual_derivation);
    positive(t, "lax_residual", th.lax_residual);
    positive(t, "conservation", th.conservation);
    positive(t, "commutativity", th.commutativity);
    positive(t, "constraint_drift", th.constraint_drift);
    positive(t, "rank_one", th.rank_one);
    positive(t, "w1_v_consistency", th.w1_v_consistency);
    positive(t, "t1_shift", th.t1_shift);
    positive(t, "linear_problem", th.linear_problem);
    positive(t, "residue_identity", th.residue_identity);
    positive(t, "first_order_pole", th.first_order_pole);
    positive(t, "n1_reduction", th.n1_reduction);
    positive(t, "contour_oracle", th.contour_oracle);
  }
  if (j.contains("integrator")) {
    const json& t = j["integrator"];
    positive(t, "dt", suite.dt);
    positive(t, "flow_time", suite.flow_time);
    if (t.contains("method")) {
      const auto m = t["method"].get<std::string>();
      if (m == "rk4") {
        cfg.method = Method::RK4;
      } else if (m == "rk45") {
        cfg.method = Method::RK45;
      } else {
        throw std::invalid_argument("config: integrator.method must be 'rk4' or 'rk45'");
      }
    }
    if (t.contains("record_every")) cfg.record_every = t["record_every"].get<int>();
  }
  if (j.contains("contour")) {
    const json& t = j["contour"];
    if (t.contains("nodes")) suite.contour.nodes = t["nodes"].get<int>();
    positive(t, "radius_factor", suite.contour.radius_factor);
    if (suite.contour.nodes < 1) throw std::invalid_argument("config: contour.nodes must be >= 1");
  }
  if (j.contains("kp")) {
    const json& t = j["kp"];
    if (t.contains("z")) suite.z = parse_complex(t["z"].get<std::string>());
    positive(t, "dt2", suite.dt2);
    if (t.contains("grid_points")) suite.grid_points = t["grid_points"].get<int>();
  }
  if (j.contains("output") && j["output"].contains("dir")) {
    cfg.output_dir = j["output"]["dir"].get<std::string>();
  }
  return cfg;
}

Config read_config(const std::string& path) { return config_from_json(read_file(path)); }

}  // namespace spincm::io
