#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spinsde/montecarlo.hpp"

namespace spinsde {

/// User-facing run parameters. Text form is flat `key=value` lines with the
/// keys below; `#` starts a comment.
///
///   model         deterministic | rescaled-ito | pullback-ito | stratonovich | alpha0-exact
///   alpha         damping (>= 0)
///   b             external field "x,y,z"
///   x0            initial state "x,y,z" (unit within 1e-6) or "antipodal" (-b/|b|)
///   eps0, beta    noise schedule eps0 / (t+1)^beta; beta = 0 is constant
///   dt, T         time step and horizon
///   n_paths       ensemble size (>= 2)
///   master_seed   unsigned 64-bit seed
///   scheme        euler | projected-euler | midpoint
///   record_times  log:K | uniform:K | all | comma-separated times
///   output        output CSV path; empty writes to stdout
struct RunConfig {
  ModelKind model = ModelKind::StratonovichIto;
  double alpha = 2.0;
  Vec3 b = Vec3::UnitX();
  bool x0_antipodal = false;
  Vec3 x0 = Vec3(-0.5, 0.86602540378443865, 0.0);
  double eps0 = 0.1;
  double beta = 1.0;
  double dt = 2e-2;
  double T = 10.0;
  int n_paths = 500;
  std::uint64_t master_seed = 0;
  SchemeKind scheme = SchemeKind::SemiImplicitMidpoint;
  std::string record_times = "log:200";
  std::string output;

  bool operator==(const RunConfig&) const = default;
};

/// Applies one key=value setting. Throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Applies every setting in a config text on top of `cfg`.
void apply_config_text(RunConfig& cfg, std::string_view text);

RunConfig parse_config_text(std::string_view text);

/// Canonical text form; parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& cfg);

/// Named parameter sets fig2 .. fig6.
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Resolves x0 ("antipodal", normalization) and record times, and checks
/// every invariant. Throws ConfigError.
EnsembleConfig to_ensemble(const RunConfig& cfg, unsigned threads = 0);

std::vector<double> resolve_record_times(std::string_view spec, double T, double dt);

std::string_view model_name(ModelKind kind);
std::string_view scheme_name(SchemeKind kind);

}  // namespace spinsde
