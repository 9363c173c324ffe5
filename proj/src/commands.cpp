#include "spinsde/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "spinsde/errors.hpp"
#include "spinsde/parallel.hpp"

namespace spinsde {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

CommandResult fail(int code, std::string message) {
  CommandResult r;
  r.exit_code = code;
  r.message = std::move(message);
  return r;
}

// Maps library exceptions onto exit codes.
template <typename Fn>
CommandResult guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return fail(kExitConfig, std::string("config error: ") + e.what());
  } catch (const StepFailure& e) {
    return fail(kExitScheme, std::string("scheme failure: ") + e.what());
  } catch (const NonConvergence& e) {
    return fail(kExitScheme, std::string("scheme failure: ") + e.what());
  } catch (const DegenerateState& e) {
    return fail(kExitScheme, std::string("scheme failure: ") + e.what());
  } catch (const std::overflow_error& e) {
    return fail(kExitScheme, std::string("numeric overflow: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, std::string("invalid arguments: ") + e.what());
  }
}

std::string limit_row(const EstimatorSeries& s, double limit) {
  const auto last = static_cast<Eigen::Index>(s.size() - 1);
  const double se = s.std_error(last, 0);
  const double diff = s.mean(last, 0) - limit;
  const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
  return "limit," + fmt(limit) + "," + fmt(z) + "," + std::to_string(s.n_paths) + "\n";
}

}  // namespace

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  return guarded([&] {
    const EnsembleConfig e = to_ensemble(cfg, 1);
    const std::uint64_t seed = path_seed(e.master_seed, 0);
    const auto dW = brownian_increments(seed, step_count(e.T, e.scheme.dt), e.scheme.dt);
    std::string csv = "t,mu_x,mu_y,mu_z,norm\n";
    std::size_t k = 0;
    const auto& rec = e.record_times;
    integrate(e.model, e.scheme, e.x0, dW,
              [&](std::size_t n, double t, const Vec3& x, const Vec3&) {
                if (k < rec.size() && std::llround(rec[k] / e.scheme.dt) ==
                                          static_cast<long long>(n)) {
                  csv += fmt(t) + "," + fmt(x(0)) + "," + fmt(x(1)) + "," + fmt(x(2)) + "," +
                         fmt(x.norm()) + "\n";
                  ++k;
                }
              });
    CommandResult r;
    r.files.push_back({cfg.output, std::move(csv)});
    return r;
  });
}

CommandResult cmd_moments(const RunConfig& cfg, int p, unsigned threads) {
  return guarded([&] {
    if (p < 0) return fail(kExitConfig, "moment order p must be >= 0");
    if (cfg.model != ModelKind::StratonovichIto) {
      return fail(kExitConfig, "moments require model=stratonovich");
    }
    if (cfg.alpha == 0.0) {
      return fail(kExitUndefinedRate, "moment limit ((alpha^2+1)/(2 alpha))^p p! is undefined at alpha = 0");
    }
    const EnsembleConfig e = to_ensemble(cfg, threads);
    const auto gap = estimate_gap_moment(e, p);
    const auto sq = estimate_sqnorm_moment(e, p);
    CommandResult r;
    std::string gap_csv = gap.to_csv() + limit_row(gap, gap_moment_limit(cfg.alpha, p));
    std::string sq_csv =
        sq.to_csv() + limit_row(sq, sqnorm_moment_limit(cfg.alpha, cfg.b.norm(), p));
    if (cfg.output.empty()) {
      r.files.push_back({"", gap_csv + "\n" + sq_csv});
    } else {
      r.files.push_back({cfg.output, std::move(gap_csv)});
      r.files.push_back({sibling_path(cfg.output, "_sqnorm"), std::move(sq_csv)});
    }
    return r;
  });
}

CommandResult cmd_alpha0(const RunConfig& cfg, int p, unsigned threads) {
  return guarded([&] {
    if (p < 1) return fail(kExitConfig, "martingale moment order p must be >= 1");
    if (cfg.alpha != 0.0) return fail(kExitConfig, "alpha0 command requires alpha = 0");
    RunConfig exact = cfg;
    exact.model = ModelKind::Alpha0Exact;
    const EnsembleConfig e = to_ensemble(exact, threads);
    const auto mean = estimate_mean_state(e);
    const auto mart = martingale_moment_alpha0(e, p);

    std::string mart_csv = "t,mean,stderr,n_paths,bound\n";
    for (std::size_t i = 0; i < mart.estimate.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      mart_csv += fmt(mart.estimate.times[i]) + "," + fmt(mart.estimate.mean(row, 0)) + "," +
                  fmt(mart.estimate.std_error(row, 0)) + "," +
                  std::to_string(mart.estimate.n_paths) + "," + fmt(mart.bound[i]) + "\n";
    }
    CommandResult r;
    if (cfg.output.empty()) {
      r.files.push_back({"", mean.to_csv() + "\n" + mart_csv});
    } else {
      r.files.push_back({cfg.output, mean.to_csv()});
      r.files.push_back({sibling_path(cfg.output, "_martingale"), std::move(mart_csv)});
    }
    return r;
  });
}

CommandResult cmd_verify(const std::vector<std::string>& only, const CorrectionFn& closed_form) {
  return guarded([&] {
    const auto gates = run_gates(only, closed_form);
    CommandResult r;
    r.files.push_back({"", gates_to_csv(gates)});
    for (const auto& g : gates) {
      if (!g.pass) {
        r.exit_code = kExitGateFailed;
        r.message += "gate failed: " + g.group + "/" + g.name + "\n";
      }
    }
    return r;
  });
}

CommandResult cmd_verify(const std::vector<std::string>& only) {
  return cmd_verify(only, [](const Vec3& x, double alpha) {
    return strato_drift_correction(x, alpha);
  });
}

CommandResult cmd_schemes_compare(const RunConfig& cfg, unsigned threads) {
  return guarded([&] {
    if (cfg.model != ModelKind::StratonovichIto && cfg.model != ModelKind::Deterministic) {
      return fail(kExitConfig, "schemes-compare needs model=stratonovich or deterministic");
    }
    constexpr std::size_t kRefine = 16;
    const EnsembleConfig e = to_ensemble(cfg, threads);
    const std::size_t n_steps = step_count(e.T, e.scheme.dt);
    const auto n_paths = static_cast<std::size_t>(e.n_paths);
    constexpr SchemeKind kinds[] = {SchemeKind::ExplicitEuler, SchemeKind::ProjectedEuler,
                                    SchemeKind::SemiImplicitMidpoint};
    // [scheme][path]
    std::vector<std::vector<double>> drift(3, std::vector<double>(n_paths));
    std::vector<std::vector<double>> err2(3, std::vector<double>(n_paths));

    parallel_for(n_paths, threads, [&](std::size_t path) {
      const auto fine = brownian_increments(path_seed(e.master_seed, path), n_steps * kRefine,
                                            e.scheme.dt / kRefine);
      SchemeSpec ref_scheme = e.scheme;
      ref_scheme.kind = SchemeKind::SemiImplicitMidpoint;
      ref_scheme.dt = e.scheme.dt / kRefine;
      const Vec3 ref = simulate_with_increments(e.model, ref_scheme, e.x0, fine).states.back();
      const auto coarse = coarsen(fine, kRefine);
      for (std::size_t s = 0; s < 3; ++s) {
        SchemeSpec sc = e.scheme;
        sc.kind = kinds[s];
        const auto traj = simulate_with_increments(e.model, sc, e.x0, coarse);
        drift[s][path] = traj.norm_drift;
        err2[s][path] = (traj.states.back() - ref).squaredNorm();
      }
    });

    std::string csv = "scheme,dt,norm_drift_max,norm_drift_mean,terminal_error_rms,n_paths\n";
    for (std::size_t s = 0; s < 3; ++s) {
      double max_drift = 0.0;
      for (double d : drift[s]) max_drift = std::max(max_drift, d);
      const double mean_drift = pairwise_sum(drift[s].data(), n_paths) / n_paths;
      const double rms = std::sqrt(pairwise_sum(err2[s].data(), n_paths) / n_paths);
      csv += std::string(scheme_name(kinds[s])) + "," + fmt(e.scheme.dt) + "," + fmt(max_drift) +
             "," + fmt(mean_drift) + "," + fmt(rms) + "," + std::to_string(n_paths) + "\n";
    }
    CommandResult r;
    r.files.push_back({cfg.output, std::move(csv)});
    return r;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-spin stochastic Landau-Lifshitz simulator"};
  app.require_subcommand(1);

  struct Common {
    std::string config_file;
    std::string preset_name;
    std::vector<std::string> sets;
    unsigned threads = 0;
    std::vector<std::pair<std::string, std::optional<std::string>>> fields;
  };
  static const char* kFieldKeys[][2] = {
      {"model", "--model"},   {"alpha", "--alpha"},   {"b", "--b"},
      {"x0", "--x0"},         {"eps0", "--eps0"},     {"beta", "--beta"},
      {"dt", "--dt"},         {"T", "--T"},           {"n_paths", "--n-paths"},
      {"master_seed", "--seed"}, {"scheme", "--scheme"}, {"record_times", "--record-times"},
      {"output", "--output"}};

  auto add_common = [](CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_file, "key=value config file");
    sub->add_option("--preset", c.preset_name, "fig2 | fig3 | fig4 | fig5 | fig6");
    sub->add_option("--set", c.sets, "extra key=value settings");
    sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    c.fields.reserve(std::size(kFieldKeys));
    for (const auto& kv : kFieldKeys) {
      c.fields.emplace_back(kv[0], std::nullopt);
      sub->add_option(kv[1], c.fields.back().second, std::string("override ") + kv[0]);
    }
  };

  Common c_sim, c_mom, c_a0, c_cmp, c_cfg;
  int p_mom = 1;
  int p_a0 = 1;
  std::vector<std::string> only;
  std::string verify_output;

  auto* sim = app.add_subcommand("simulate", "single trajectory CSV");
  add_common(sim, c_sim);
  auto* mom = app.add_subcommand("moments", "gap and squared-norm moment estimators");
  add_common(mom, c_mom);
  mom->add_option("--p", p_mom, "moment order");
  auto* a0 = app.add_subcommand("alpha0", "alpha = 0 mean state and martingale moments");
  add_common(a0, c_a0);
  a0->add_option("--p", p_a0, "martingale moment order");
  auto* ver = app.add_subcommand("verify", "run the oracle gates");
  ver->add_option("--only", only, "gate groups: drift, lemmas, refinement, norms")
      ->delimiter(',');
  ver->add_option("--output", verify_output, "output CSV path (default stdout)");
  auto* cmp = app.add_subcommand("schemes-compare", "scheme comparison on common noise");
  add_common(cmp, c_cmp);
  auto* cfgcmd = app.add_subcommand("config", "print the resolved configuration");
  add_common(cfgcmd, c_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  auto build = [&err](const Common& c, RunConfig& cfg) -> bool {
    try {
      if (!c.preset_name.empty()) cfg = preset(c.preset_name);
      if (!c.config_file.empty()) {
        std::ifstream in(c.config_file);
        if (!in) throw ConfigError("cannot read config file '" + c.config_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        apply_config_text(cfg, ss.str());
      }
      for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
      }
      for (const auto& [key, value] : c.fields) {
        if (value) apply_setting(cfg, key, *value);
      }
      return true;
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return false;
    }
  };

  CommandResult result;
  RunConfig cfg;
  if (sim->parsed()) {
    if (!build(c_sim, cfg)) return kExitConfig;
    result = cmd_simulate(cfg);
  } else if (mom->parsed()) {
    if (!build(c_mom, cfg)) return kExitConfig;
    result = cmd_moments(cfg, p_mom, c_mom.threads);
  } else if (a0->parsed()) {
    if (!build(c_a0, cfg)) return kExitConfig;
    result = cmd_alpha0(cfg, p_a0, c_a0.threads);
  } else if (ver->parsed()) {
    result = cmd_verify(only);
    for (auto& f : result.files) f.path = verify_output;
  } else if (cmp->parsed()) {
    if (!build(c_cmp, cfg)) return kExitConfig;
    result = cmd_schemes_compare(cfg, c_cmp.threads);
  } else if (cfgcmd->parsed()) {
    if (!build(c_cfg, cfg)) return kExitConfig;
    result.files.push_back({"", to_config_text(cfg)});
  }

  if (!result.message.empty()) err << result.message << (result.message.back() == '\n' ? "" : "\n");
  // verify prints its table even when a gate fails.
  if (result.exit_code != kExitOk && result.exit_code != kExitGateFailed) return result.exit_code;
  for (const auto& f : result.files) {
    if (f.path.empty()) {
      out << f.content;
      continue;
    }
    std::ofstream file(f.path, std::ios::binary);
    if (!file) {
      err << "cannot write '" << f.path << "'\n";
      return kExitConfig;
    }
    file << f.content;
  }
  return result.exit_code;
}

}  // namespace spinsde
