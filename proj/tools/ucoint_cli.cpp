#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ucoint/errors.hpp"
#include "ucoint/ingest.hpp"
#include "ucoint/montecarlo.hpp"
#include "ucoint/pipeline.hpp"
#include "ucoint/unitroot.hpp"

using namespace ucoint;
namespace fs = std::filesystem;

namespace {

struct ConfigFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool with_output = false;
  std::string trim;
  int threads = 0;
};

void add_config_flags(CLI::App* app, ConfigFlags& f, bool required) {
  auto* c = app->add_option("--config", f.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  if (required) c->required();
  app->add_option("--out", f.out, "Output directory (overrides the config)");
  app->add_option("--seed", f.seed, "Random seed (overrides the config)");
  app->add_flag("--with-output", f.with_output, "Add industrial production growth to every regression");
  app->add_option("--trim", f.trim, "Break trimming as lo,hi (e.g. 0.15,0.85)");
  app->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
}

Trim parse_trim(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError(fmt::format("--trim expects lo,hi, got '{}'", s));
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("--trim expects two numbers, got '{}'", s));
  }
}

PipelineConfig resolve_config(const ConfigFlags& f) {
  auto cfg = PipelineConfig::load(f.config);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.with_output) cfg.with_output = true;
  if (!f.trim.empty()) cfg.trim = parse_trim(f.trim);
  if (f.threads > 0) cfg.threads = f.threads;
  cfg.validate();
  return cfg;
}

TimeSeries apply_transform(const TimeSeries& s, const std::string& t) {
  if (t == "none") return s;
  if (t == "log") return log_level(s);
  if (t == "yoy") return yoy_growth(s);
  if (t == "diff") return diff(s);
  throw ConfigError(fmt::format("unknown transform '{}'", t));
}

Deterministic parse_deterministic(const std::string& s) {
  if (s == "c") return Deterministic::constant;
  if (s == "ct") return Deterministic::constant_trend;
  throw ConfigError(fmt::format("unknown deterministic term '{}' (use c or ct)", s));
}

void print_stage(Stage s, const std::vector<fs::path>& files) {
  for (const auto& f : files) fmt::print("{}: wrote {}\n", stage_name(s), f.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cointegration with structural breaks between stock prices, inflation and inflation uncertainty"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  std::map<Stage, ConfigFlags> flags;
  std::map<Stage, CLI::App*> stage_cmds;
  auto staged = [&](Stage s, const std::string& help, bool required) {
    auto* cmd = app.add_subcommand(stage_name(s), help);
    add_config_flags(cmd, flags[s], required);
    stage_cmds[s] = cmd;
    return cmd;
  };

  staged(Stage::fetch, "Load and align the dataset described by the manifest", true);
  auto* ucsv_cmd = staged(Stage::ucsv, "UC-SV decomposition of inflation", false);
  auto* ur_cmd = staged(Stage::unitroot, "ADF and Phillips-Perron unit-root tests", false);
  auto* gh_cmd = staged(Stage::gh, "Gregory-Hansen cointegration tests", false);
  auto* fit_cmd = staged(Stage::fit, "Break-dummy cointegration regressions and Wald tests", false);
  staged(Stage::ecm, "Error correction models for cointegrated indexes", true);
  staged(Stage::var, "First-differenced VARs for non-cointegrated indexes", true);
  staged(Stage::cusum, "CUSUM and CUSUM-SQ stability paths of the ECMs", true);
  staged(Stage::report, "Assemble summary.md from the stage outputs", true);

  ConfigFlags pipe_flags;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage in order");
  add_config_flags(pipe_cmd, pipe_flags, true);

  // Standalone inputs for single-file use.
  std::string input, transform = "none", spec = "c", model_text, break_date;
  std::optional<int> max_lag, bandwidth;
  int draws = 5000, burn = 1000;
  double gamma = 0.04;
  for (auto* cmd : {ucsv_cmd, ur_cmd, gh_cmd, fit_cmd})
    cmd->add_option("--input", input, "CSV input (date,value; a panel for gh and fit)")->check(CLI::ExistingFile);
  for (auto* cmd : {ucsv_cmd, ur_cmd})
    cmd->add_option("--transform", transform, "none, log, yoy or diff")->check(CLI::IsMember({"none", "log", "yoy", "diff"}));
  ur_cmd->add_option("--spec", spec, "Deterministic terms: c or ct")->check(CLI::IsMember({"c", "ct"}));
  ur_cmd->add_option("--max-lag", max_lag, "Largest ADF lag considered");
  for (auto* cmd : {ur_cmd, gh_cmd}) cmd->add_option("--bandwidth", bandwidth, "Bartlett bandwidth");
  gh_cmd->add_option("--model", model_text, "LS, LST, RS or RST (default: all)");
  fit_cmd->add_option("--model", model_text, "LS, LST, RS or RST")->required(false);
  fit_cmd->add_option("--break-date", break_date, "Last month before the break, e.g. 2009M4");
  ucsv_cmd->add_option("--draws", draws, "Gibbs iterations including burn-in");
  ucsv_cmd->add_option("--burn-in", burn, "Discarded iterations");
  ucsv_cmd->add_option("--gamma", gamma, "Log-volatility step variance");

  std::string sim_model = "LS", sim_out;
  int sim_m = 2, sim_n = 160, sim_reps = 5000, sim_threads = 1;
  std::uint64_t sim_seed = 1996;
  auto* sim_cmd = app.add_subcommand("simulate-cv", "Simulate Gregory-Hansen critical values under independent random walks");
  sim_cmd->add_option("--model", sim_model, "LS, LST, RS or RST");
  sim_cmd->add_option("--m", sim_m, "Number of I(1) regressors")->check(CLI::Range(1, 6));
  sim_cmd->add_option("--n", sim_n, "Sample size");
  sim_cmd->add_option("--reps", sim_reps, "Replications");
  sim_cmd->add_option("--seed", sim_seed, "Master seed");
  sim_cmd->add_option("--threads", sim_threads, "Worker threads")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (pipe_cmd->parsed()) {
      auto cfg = resolve_config(pipe_flags);
      auto files = run_pipeline(cfg);
      fmt::print("pipeline: {} files written to {}\n", files.size(), cfg.output_dir.string());
      return 0;
    }

    if (sim_cmd->parsed()) {
      SimulationOptions opts;
      opts.seed = sim_seed;
      opts.threads = sim_threads;
      const auto model = parse_model(sim_model);
      auto t = simulate_critical_values(model, sim_m, sim_n, sim_reps, {0.01, 0.025, 0.05, 0.10}, opts);
      std::string out = fmt::format("# model={}\n# m={}\n# n={}\n# reps={}\n# seed={}\nstatistic,level,value\n",
                                    model_code(model), sim_m, sim_n, sim_reps, sim_seed);
      for (auto s : {GhStatistic::adf, GhStatistic::zt, GhStatistic::za})
        for (std::size_t i = 0; i < t.levels.size(); ++i)
          out += fmt::format("{},{:g},{:.4f}\n", statistic_name(s), t.levels[i], t.quantiles[s][i]);
      if (sim_out.empty()) {
        fmt::print("{}", out);
      } else {
        std::ofstream f(sim_out);
        f << out;
        if (!f) throw Error(fmt::format("cannot write {}", sim_out));
      }
      return 0;
    }

    for (auto& [stage, cmd] : stage_cmds) {
      if (!cmd->parsed()) continue;
      const auto& f = flags[stage];
      if (!input.empty()) {
        if (stage == Stage::unitroot) {
          auto s = apply_transform(load_csv(input), transform);
          AdfOptions a;
          a.spec = parse_deterministic(spec);
          a.max_lags = max_lag;
          PpOptions p;
          p.spec = a.spec;
          p.bandwidth = bandwidth;
          auto ra = adf_test(s, a);
          auto rp = pp_test(s, p);
          fmt::print("variable,adf,adf_stars,adf_lags,pp,pp_stars,pp_bandwidth,nobs\n");
          fmt::print("{},{:.3f},{},{},{:.3f},{},{},{}\n", s.id(), ra.statistic, stars(ra.reject_at),
                     ra.lags_or_bandwidth, rp.statistic, stars(rp.reject_at), rp.lags_or_bandwidth, s.size());
          return 0;
        }
        if (stage == Stage::ucsv) {
          auto s = apply_transform(load_csv(input), transform);
          UcsvConfig c;
          c.gamma = gamma;
          c.n_draws = draws;
          c.burn_in = burn;
          c.seed = f.seed.value_or(0);
          auto post = estimate_ucsv(s, c);
          std::vector<TimeSeries> cols{post.pi.renamed("pi"), post.trend.renamed("trend"), post.gap.renamed("gap"),
                                       post.sigma_eta.renamed("sigma_eta"), post.sigma_eps.renamed("sigma_eps")};
          const fs::path out = f.out.empty() ? fs::path("ucsv.csv") : fs::path(f.out);
          write_panel(out, cols, {fmt::format("seed={}", c.seed)});
          fmt::print("ucsv: wrote {}\n", out.string());
          return 0;
        }
        auto panel = load_panel(input);
        if (panel.size() < 2) throw ConfigError("panel needs a dependent column and at least one regressor");
        std::vector<TimeSeries> X(panel.begin() + 1, panel.end());
        if (stage == Stage::gh) {
          GhOptions opts;
          if (!f.trim.empty()) opts.trim = parse_trim(f.trim);
          opts.bandwidth = bandwidth;
          std::vector<GhResult> results;
          std::vector<GhModel> models;
          if (model_text.empty()) models.assign(std::begin(kAllModels), std::end(kAllModels));
          else models.push_back(parse_model(model_text));
          fmt::print("model,statistic,value,break_date,lag,cv5,stars\n");
          for (auto m : models) {
            results.push_back(gh_test(panel[0], X, m, opts));
            for (auto s : {GhStatistic::adf, GhStatistic::zt, GhStatistic::za}) {
              const auto& r = results.back().stat(s);
              fmt::print("{},{},{:.3f},{},{},{:.3f},{}\n", model_name(m), statistic_name(s), r.statistic,
                         r.break_date.label(), s == GhStatistic::adf ? std::to_string(r.lag) : "",
                         r.critical_values.pct5, stars(r.reject_at));
            }
          }
          for (const auto& r : results) {
            const int rej = (r.adf.reject_at ? 1 : 0) + (r.zt.reject_at ? 1 : 0) + (r.za.reject_at ? 1 : 0);
            fmt::print("# {}: {} of 3 statistics reject at 10% or better\n", model_name(r.model), rej);
          }
          const auto d = decide(results);
          fmt::print("# cointegration {}\n", d.cointegrated ? "detected" : "not detected");
          return 0;
        }
        if (stage == Stage::fit) {
          if (model_text.empty() || break_date.empty())
            throw ConfigError("fit with --input needs --model and --break-date");
          auto fit = fit_break_regression(panel[0], X, parse_model(model_text), MonthIndex::parse(break_date));
          fmt::print("term,coef,se,t\n");
          for (Eigen::Index j = 0; j < fit.coef.size(); ++j)
            fmt::print("{},{:.6f},{:.6f},{:.3f}\n", fit.names[static_cast<std::size_t>(j)], fit.coef(j), fit.se(j),
                       fit.t_stat(static_cast<int>(j)));
          fmt::print("# R2 = {:.4f}, n = {}\n", fit.r_squared, fit.nobs);
          return 0;
        }
      }
      if (f.config.empty()) throw ConfigError(fmt::format("{} needs --config (or --input)", stage_name(stage)));
      auto cfg = resolve_config(f);
      print_stage(stage, run_stage(stage, cfg));
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
