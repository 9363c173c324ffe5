#include "spinsde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spinsde/errors.hpp"

namespace spinsde {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(text) +
                      "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Vec3 parse_vec3(std::string_view key, std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) {
    throw ConfigError("'" + std::string(key) + "' needs three comma-separated numbers");
  }
  return {parse_real(key, parts[0]), parse_real(key, parts[1]), parse_real(key, parts[2])};
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec3(const Vec3& v) {
  return fmt_real(v(0)) + "," + fmt_real(v(1)) + "," + fmt_real(v(2));
}

constexpr std::pair<ModelKind, std::string_view> kModels[] = {
    {ModelKind::Deterministic, "deterministic"},
    {ModelKind::RescaledIto, "rescaled-ito"},
    {ModelKind::PullbackIto, "pullback-ito"},
    {ModelKind::StratonovichIto, "stratonovich"},
    {ModelKind::Alpha0Exact, "alpha0-exact"},
};

constexpr std::pair<SchemeKind, std::string_view> kSchemes[] = {
    {SchemeKind::ExplicitEuler, "euler"},
    {SchemeKind::ProjectedEuler, "projected-euler"},
    {SchemeKind::SemiImplicitMidpoint, "midpoint"},
};

// Start with mu_0 . b = -0.5 at azimuth 0 for b along e1.
const Vec3 kDefaultStart(-0.5, std::sqrt(0.75), 0.0);

}  // namespace

std::string_view model_name(ModelKind kind) {
  for (const auto& [k, name] : kModels) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view scheme_name(SchemeKind kind) {
  for (const auto& [k, name] : kSchemes) {
    if (k == kind) return name;
  }
  return "?";
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "model") {
    const auto* it = std::find_if(std::begin(kModels), std::end(kModels),
                                  [&](const auto& p) { return p.second == value; });
    if (it == std::end(kModels)) throw ConfigError("unknown model '" + std::string(value) + "'");
    cfg.model = it->first;
  } else if (key == "alpha") {
    cfg.alpha = parse_real(key, value);
  } else if (key == "b") {
    cfg.b = parse_vec3(key, value);
  } else if (key == "x0") {
    if (value == "antipodal") {
      cfg.x0_antipodal = true;
    } else {
      cfg.x0_antipodal = false;
      cfg.x0 = parse_vec3(key, value);
    }
  } else if (key == "eps0") {
    cfg.eps0 = parse_real(key, value);
  } else if (key == "beta") {
    cfg.beta = parse_real(key, value);
  } else if (key == "dt") {
    cfg.dt = parse_real(key, value);
  } else if (key == "T") {
    cfg.T = parse_real(key, value);
  } else if (key == "n_paths") {
    cfg.n_paths = parse_int<int>(key, value);
  } else if (key == "master_seed") {
    cfg.master_seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "scheme") {
    const auto* it = std::find_if(std::begin(kSchemes), std::end(kSchemes),
                                  [&](const auto& p) { return p.second == value; });
    if (it == std::end(kSchemes)) throw ConfigError("unknown scheme '" + std::string(value) + "'");
    cfg.scheme = it->first;
  } else if (key == "record_times") {
    if (value.empty()) throw ConfigError("record_times must not be empty");
    cfg.record_times = std::string(value);
  } else if (key == "output") {
    cfg.output = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  auto line = [&out](std::string_view k, const std::string& v) {
    out.append(k).append("=").append(v).append("\n");
  };
  line("model", std::string(model_name(cfg.model)));
  line("alpha", fmt_real(cfg.alpha));
  line("b", fmt_vec3(cfg.b));
  line("x0", cfg.x0_antipodal ? std::string("antipodal") : fmt_vec3(cfg.x0));
  line("eps0", fmt_real(cfg.eps0));
  line("beta", fmt_real(cfg.beta));
  line("dt", fmt_real(cfg.dt));
  line("T", fmt_real(cfg.T));
  line("n_paths", std::to_string(cfg.n_paths));
  line("master_seed", std::to_string(cfg.master_seed));
  line("scheme", std::string(scheme_name(cfg.scheme)));
  line("record_times", cfg.record_times);
  line("output", cfg.output);
  return out;
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6"}; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.model = ModelKind::StratonovichIto;
  c.b = Vec3::UnitX();
  c.x0 = kDefaultStart;
  c.n_paths = 500;
  c.master_seed = 0;
  c.scheme = SchemeKind::SemiImplicitMidpoint;
  if (name == "fig2") {
    // alpha = 2, dt = 2e-2, eps_t = 0.1 / (t + 1)
    c.alpha = 2.0;
    c.dt = 2e-2;
    c.eps0 = 0.1;
    c.beta = 1.0;
    c.T = 10.0;
  } else if (name == "fig3") {
    // alpha = 2, dt = 2e-2, eps_t = 0.1 / (t + 1)^(1/3)
    c.alpha = 2.0;
    c.dt = 2e-2;
    c.eps0 = 0.1;
    c.beta = 1.0 / 3.0;
    c.T = 30.0;
  } else if (name == "fig4") {
    // alpha = 2, dt = 2e-3, mu_0 = -b/|b|, eps_t = 0.1 / (t + 1)^2
    c.alpha = 2.0;
    c.dt = 2e-3;
    c.x0_antipodal = true;
    c.eps0 = 0.1;
    c.beta = 2.0;
    c.T = 20.0;
  } else if (name == "fig5") {
    // alpha = 0, dt = 2e-3, eps_t = 0.3 / (t + 1)^2
    c.alpha = 0.0;
    c.dt = 2e-3;
    c.eps0 = 0.3;
    c.beta = 2.0;
    c.T = 50.0;
  } else if (name == "fig6") {
    // alpha = 0, dt = 2e-3, eps_t = 0.3 / (t + 1)^0.1
    c.alpha = 0.0;
    c.dt = 2e-3;
    c.eps0 = 0.3;
    c.beta = 0.1;
    c.T = 50.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

std::vector<double> resolve_record_times(std::string_view spec, double T, double dt) {
  const std::size_t n_steps = step_count(T, dt);
  auto count_after = [&](std::string_view prefix) {
    const int k = parse_int<int>("record_times", spec.substr(prefix.size()));
    if (k < 1) throw ConfigError("record_times count must be positive");
    return k;
  };
  if (spec == "all") {
    std::vector<double> out(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) out[n] = static_cast<double>(n) * dt;
    return out;
  }
  if (spec.starts_with("log:")) return log_spaced_record_times(T, dt, count_after("log:"));
  if (spec.starts_with("uniform:")) {
    const int k = count_after("uniform:");
    std::vector<double> out;
    std::size_t last = std::numeric_limits<std::size_t>::max();
    for (int i = 0; i <= k; ++i) {
      const auto n = static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * static_cast<double>(n_steps) / k));
      if (n != last) out.push_back(static_cast<double>(n) * dt);
      last = n;
    }
    return out;
  }
  // Explicit list, snapped to the grid.
  std::vector<double> out;
  for (auto part : split(spec, ',')) {
    const double t = parse_real("record_times", part);
    if (t < 0.0 || t > static_cast<double>(n_steps) * dt * (1.0 + 1e-12)) {
      throw ConfigError("record time outside [0, T]");
    }
    out.push_back(std::round(t / dt) * dt);
  }
  return out;
}

EnsembleConfig to_ensemble(const RunConfig& cfg, unsigned threads) {
  EnsembleConfig e;
  if (!(cfg.eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  if (cfg.beta < 0.0) throw ConfigError("beta must be >= 0");
  e.model = ModelSpec{cfg.model, cfg.b, cfg.alpha, NoiseSchedule::make(cfg.eps0, cfg.beta)};
  e.scheme.kind = cfg.scheme;
  e.scheme.dt = cfg.dt;
  if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  e.T = cfg.T;
  e.n_paths = cfg.n_paths;
  e.master_seed = cfg.master_seed;
  e.threads = threads;
  if (cfg.x0_antipodal) {
    const double nb = cfg.b.norm();
    if (!(nb > 0.0)) throw ConfigError("x0=antipodal needs a nonzero field b");
    e.x0 = -cfg.b / nb;
  } else {
    const double n = cfg.x0.norm();
    if (!(std::abs(n - 1.0) <= 1e-6)) throw ConfigError("x0 must be a unit vector");
    e.x0 = cfg.x0 / n;
  }
  e.record_times = resolve_record_times(cfg.record_times, cfg.T, cfg.dt);
  e.validate();
  return e;
}

}  // namespace spinsde
