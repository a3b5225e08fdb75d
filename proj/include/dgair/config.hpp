#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgair/assembly.hpp"
#include "dgair/mesh.hpp"
#include "dgair/model.hpp"
#include "dgair/solver.hpp"

namespace dgair {

/// [mesh]
struct MeshSection {
  int nx = 8;
  int ny = 8;
  Rect domain;  ///< x0, x1, y0, y1; defaults to the unit square
  bool operator==(const MeshSection&) const = default;
};

/// [dg]
struct DgSection {
  int k = 1;
  Scheme scheme = Scheme::sipg;
  std::optional<double> sigma0;  ///< default 10 k^2 (10 for k = 0)
  double beta0 = 1.0;
  bool operator==(const DgSection&) const = default;
};

/// [model]. Absent entries come from the preset; without a preset the problem
/// is u_t = 0 with zero coefficients. Expressions are stored in canonical form.
struct ModelSection {
  std::optional<std::string> kx, ky, c, e, emission, chemistry, u0, exact;
  std::optional<double> k1, k2;
  std::optional<double> k_lower, k_upper, c_lower, c_upper;
  std::optional<double> lipschitz;
  std::optional<double> u_min, u_max;
  /// Replace E by the forcing that makes `exact` solve the PDE.
  bool manufactured = false;
  bool operator==(const ModelSection&) const = default;
};

/// [time]
struct TimeSection {
  Integrator integrator = Integrator::ssprk3;
  std::optional<double> dt;          ///< "auto" selects the CFL step
  std::optional<double> final_time;  ///< default: the preset's T, else 1
  double safety = 0.5;
  double picard_tolerance = 1e-12;
  int picard_max_iterations = 50;
  double linear_tolerance = 1e-10;
  int startup_steps = 0;
  bool operator==(const TimeSection&) const = default;
};

/// [run]
struct RunSection {
  std::string preset = "custom";
  std::vector<int> levels{8, 16, 32, 64};
  double dt_scale = 0.25;  ///< implicit convergence runs: dt = dt_scale h^((k+1)/p)
  std::uint64_t seed = 42;
  std::size_t samples = 100;
  std::vector<double> sigma_grid{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0};
  bool operator==(const RunSection&) const = default;
};

/// [output]
struct OutputSection {
  std::string directory = "out";
  std::size_t vtk_stride = 1;  ///< 0 disables VTK output
  std::size_t observer_stride = 1;
  bool observers_csv = true;
  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  MeshSection mesh;
  DgSection dg;
  ModelSection model;
  TimeSection time;
  RunSection run;
  OutputSection output;
  bool operator==(const RunConfig&) const = default;
};

/// INI text: `[section]` headers, `key = value` lines, `#` comments. Unknown
/// sections or keys, malformed lines, bad values and expression parse errors
/// raise ConfigError carrying the 1-based line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

/// Preset plus [model] overrides. Throws ConfigError for unknown presets and
/// InvalidArgument when the manufactured forcing cannot be built.
ProblemSpec build_problem(const RunConfig& cfg);
PenaltyConfig build_penalty(const RunConfig& cfg);
TimeConfig build_time(const RunConfig& cfg, const ProblemSpec& spec);

}  // namespace dgair
