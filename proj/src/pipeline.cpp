#include "ucoint/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <Eigen/Core>
#include <fmt/format.h>
#include <json.hpp>

#include "ucoint/dynamics.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/montecarlo.hpp"
#include "ucoint/stability.hpp"

namespace ucoint {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> read_optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<int>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(fmt::format("unknown key '{}' in {}", k, where));
}

}  // namespace

std::string library_version() { return kVersion; }

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

PipelineConfig PipelineConfig::parse(const std::string& json_text, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    auto j = json::parse(json_text);
    check_keys(j,
               {"manifest", "output_dir", "fred_cache", "seed", "with_output", "ucsv", "trim", "bandwidth",
                "gh_max_lag", "unitroot", "decision", "ecm_difference_lags", "var_lags", "cusum_level", "threads"},
               "config");
    if (!j.contains("seed")) throw ConfigError("config must set 'seed'");
    c.seed = j["seed"].get<std::uint64_t>();
    auto resolve = [&](const std::string& p) {
      fs::path q = p;
      return q.is_relative() ? base_dir / q : q;
    };
    c.manifest = resolve(j.at("manifest").get<std::string>());
    c.output_dir = resolve(j.value("output_dir", std::string("out")));
    c.fred_cache = resolve(j.value("fred_cache", std::string("cache")));
    c.with_output = j.value("with_output", false);
    if (j.contains("ucsv")) {
      const auto& u = j["ucsv"];
      check_keys(u, {"gamma", "n_draws", "burn_in"}, "ucsv");
      c.ucsv.gamma = u.value("gamma", c.ucsv.gamma);
      c.ucsv.n_draws = u.value("n_draws", c.ucsv.n_draws);
      c.ucsv.burn_in = u.value("burn_in", c.ucsv.burn_in);
    }
    if (j.contains("trim")) {
      auto t = j["trim"].get<std::vector<double>>();
      if (t.size() != 2) throw ConfigError("trim must be a pair [lo, hi]");
      c.trim = {t[0], t[1]};
    }
    c.bandwidth = read_optional_int(j, "bandwidth");
    c.gh_max_lag = read_optional_int(j, "gh_max_lag");
    if (j.contains("unitroot")) {
      const auto& u = j["unitroot"];
      check_keys(u, {"deterministic", "max_lag"}, "unitroot");
      const auto d = u.value("deterministic", std::string("constant"));
      if (d == "constant") c.unitroot_spec = Deterministic::constant;
      else if (d == "constant_trend") c.unitroot_spec = Deterministic::constant_trend;
      else throw ConfigError(fmt::format("unknown unit-root deterministic term '{}'", d));
      c.unitroot_max_lag = read_optional_int(u, "max_lag");
    }
    if (j.contains("decision")) {
      const auto& d = j["decision"];
      check_keys(d, {"level", "required"}, "decision");
      c.decision_level = d.value("level", c.decision_level);
      c.decision_required = d.value("required", c.decision_required);
    }
    c.ecm_difference_lags = j.value("ecm_difference_lags", c.ecm_difference_lags);
    c.var_lags = j.value("var_lags", c.var_lags);
    c.cusum_level = j.value("cusum_level", c.cusum_level);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("invalid config: {}", e.what()));
  }
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  if (!fs::exists(manifest)) throw ConfigError(fmt::format("manifest {} does not exist", manifest.string()));
  ucsv.validate();
  if (!(trim.lo > 0.0 && trim.lo < trim.hi && trim.hi < 1.0))
    throw ConfigError(fmt::format("trim ({}, {}) must satisfy 0 < lo < hi < 1", trim.lo, trim.hi));
  if (bandwidth && *bandwidth < 0) throw ConfigError("bandwidth must be non-negative");
  if (gh_max_lag && *gh_max_lag < 0) throw ConfigError("gh_max_lag must be non-negative");
  if (unitroot_max_lag && *unitroot_max_lag < 0) throw ConfigError("unit-root max_lag must be non-negative");
  level_from_fraction(decision_level);
  if (decision_required < 1 || decision_required > 3) throw ConfigError("decision.required must be 1, 2 or 3");
  if (ecm_difference_lags < 0) throw ConfigError("ecm_difference_lags must be non-negative");
  if (var_lags < 1) throw ConfigError("var_lags must be at least 1");
  level_from_fraction(cusum_level);
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::string PipelineConfig::canonical_json() const {
  json j;
  j["seed"] = seed;
  j["with_output"] = with_output;
  j["ucsv"] = {{"gamma", ucsv.gamma}, {"n_draws", ucsv.n_draws}, {"burn_in", ucsv.burn_in}};
  j["trim"] = {trim.lo, trim.hi};
  j["bandwidth"] = optional_int(bandwidth);
  j["gh_max_lag"] = optional_int(gh_max_lag);
  j["unitroot"] = {{"deterministic", unitroot_spec == Deterministic::constant ? "constant" : "constant_trend"},
                   {"max_lag", optional_int(unitroot_max_lag)}};
  j["decision"] = {{"level", decision_level}, {"required", decision_required}};
  j["ecm_difference_lags"] = ecm_difference_lags;
  j["var_lags"] = var_lags;
  j["cusum_level"] = cusum_level;
  return j.dump();
}

std::string PipelineConfig::hash() const {
  const auto m = DatasetManifest::load(manifest);
  return fmt::format("{:016x}", fnv1a(canonical_json() + "\n" + m.to_json()));
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> s{Stage::fetch, Stage::ucsv, Stage::unitroot, Stage::gh, Stage::fit,
                                    Stage::ecm,   Stage::var,  Stage::cusum,    Stage::report};
  return s;
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::fetch: return "fetch";
    case Stage::ucsv: return "ucsv";
    case Stage::unitroot: return "unitroot";
    case Stage::gh: return "gh";
    case Stage::fit: return "fit";
    case Stage::ecm: return "ecm";
    case Stage::var: return "var";
    case Stage::cusum: return "cusum";
    case Stage::report: return "report";
  }
  return "?";
}

Stage parse_stage(const std::string& name) {
  for (auto s : all_stages())
    if (stage_name(s) == name) return s;
  throw ConfigError(fmt::format("unknown stage '{}'", name));
}

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(fmt::format("missing column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  return fmt::format("{:.6f}", v);
}
std::string exact(double v) { return fmt::format("{:.17g}", v); }

double to_double(const std::string& s) { return s == "nan" ? std::nan("") : std::stod(s); }

double two_sided_p(double t, int df) {
  if (!std::isfinite(t) || df < 1) return std::nan("");
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

struct Ctx {
  const PipelineConfig& cfg;
  const StageIo& io;
  std::string hash;
  Stage stage;
  std::vector<fs::path> written;

  fs::path file(const std::string& name) const { return cfg.output_dir / name; }
  std::vector<std::string> comments() const {
    return {"config_hash=" + hash, "stage=" + stage_name(stage), fmt::format("seed={}", cfg.seed)};
  }
  void check(const fs::path& path) const {
    if (!fs::exists(path))
      throw ConfigError(fmt::format("{} not found; run the stage that produces it first", path.string()));
    for (const auto& [k, v] : read_csv_comments(path))
      if (k == "config_hash") {
        if (v != hash)
          throw ConfigError(fmt::format("{} was produced under config hash {}, current config is {}; refusing to mix",
                                        path.filename().string(), v, hash));
        return;
      }
    throw ConfigError(fmt::format("{} carries no config hash", path.string()));
  }

  void write(const std::string& name, const Table& t) {
    const auto path = file(name);
    std::string out;
    for (const auto& c : comments()) out += "# " + c + "\n";
    auto line = [](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      return s + "\n";
    };
    out += line(t.header);
    for (const auto& r : t.rows) out += line(r);
    write_text(path, out);
  }

  void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = fs::path(path).concat(".partial");
    {
      std::ofstream o(tmp, std::ios::binary);
      o << content;
      if (!o.flush()) throw Error(fmt::format("cannot write {}", path.string()));
    }
    fs::rename(tmp, path);
    written.push_back(path);
  }

  void write_series_panel(const std::string& name, const std::vector<TimeSeries>& s) {
    write_panel(file(name), s, comments());
    written.push_back(file(name));
  }

  Table read(const std::string& name) const {
    const auto path = file(name);
    check(path);
    std::ifstream in(path);
    Table t;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::size_t pos = 0;
      while (true) {
        auto next = line.find(',', pos);
        cells.push_back(line.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
      }
      if (t.header.empty()) t.header = std::move(cells);
      else t.rows.push_back(std::move(cells));
    }
    return t;
  }

  std::vector<TimeSeries> read_panel(const std::string& name) const {
    check(file(name));
    return load_panel(file(name));
  }
};

const std::set<std::string> kReserved{"I", "U", "IP", "date"};

struct Inputs {
  TimeSeries inflation;
  std::optional<TimeSeries> output;
  TimeSeries uncertainty;
  std::vector<TimeSeries> indexes;

  std::vector<TimeSeries> regressors(bool with_output) const {
    std::vector<TimeSeries> x{inflation, uncertainty};
    if (with_output) x.push_back(*output);
    return x;
  }
  const TimeSeries& index(const std::string& id) const {
    for (const auto& s : indexes)
      if (s.id() == id) return s;
    throw ConfigError(fmt::format("index '{}' not found in data.csv", id));
  }
};

struct DataPanel {
  TimeSeries inflation;
  std::optional<TimeSeries> output;
  std::vector<TimeSeries> indexes;
};

DataPanel read_data(const Ctx& ctx) {
  auto panel = ctx.read_panel("data.csv");
  std::optional<TimeSeries> inflation, output;
  std::vector<TimeSeries> indexes;
  for (auto& s : panel) {
    if (s.id() == "I") inflation = s;
    else if (s.id() == "IP") output = s;
    else indexes.push_back(s);
  }
  if (!inflation) throw ConfigError("data.csv has no inflation column 'I'");
  if (indexes.empty()) throw ConfigError("data.csv has no index columns");
  if (ctx.cfg.with_output && !output) throw ConfigError("with_output is set but the dataset has no 'ip' series");
  return {*inflation, output, indexes};
}

Inputs read_inputs(const Ctx& ctx) {
  auto d = read_data(ctx);
  auto post = ctx.read_panel("ucsv.csv");
  std::optional<TimeSeries> u;
  for (auto& s : post)
    if (s.id() == "sigma_eta") u = s.renamed("U");
  if (!u) throw ConfigError("ucsv.csv has no sigma_eta column");
  if (u->start() != d.inflation.start() || u->size() != d.inflation.size())
    throw AlignmentError("ucsv.csv does not cover the data.csv sample");
  return {d.inflation, d.output, *u, d.indexes};
}

// ---- fetch ----

void stage_fetch(Ctx& ctx) {
  const auto manifest = DatasetManifest::load(ctx.cfg.manifest);
  MaterializeOptions opts;
  const bool needs_fred =
      std::any_of(manifest.entries.begin(), manifest.entries.end(), [](const auto& e) { return e.source == Source::fred; });
  if (needs_fred) {
    std::shared_ptr<Transport> transport = ctx.io.transport;
    if (!transport) transport = make_https_transport();
    opts.fred = std::make_shared<FredClient>(transport, ctx.cfg.fred_cache);
    opts.api_key = ctx.io.api_key.empty() ? fred_api_key_from_env() : ctx.io.api_key;
  }
  auto cpi = manifest.with_role("cpi");
  auto ip = manifest.with_role("ip");
  if (cpi.size() != 1) throw ConfigError("manifest needs exactly one series with role 'cpi'");
  if (ip.size() > 1) throw ConfigError("manifest has more than one series with role 'ip'");
  for (const auto& e : manifest.entries) {
    if (e.role != "cpi" && e.role != "ip" && !e.role.empty() && e.role != "index")
      throw ConfigError(fmt::format("unknown role '{}' for {}", e.role, e.id));
    if (kReserved.count(e.id)) throw ConfigError(fmt::format("series id '{}' is reserved", e.id));
  }

  auto set = materialize(manifest, opts);
  std::vector<TimeSeries> panel{set.at(cpi[0]->id).renamed("I")};
  if (!ip.empty()) panel.push_back(set.at(ip[0]->id).renamed("IP"));
  for (const auto& e : manifest.entries)
    if (e.role.empty() || e.role == "index") panel.push_back(set.at(e.id));
  if (panel.size() < 2 + ip.size()) throw ConfigError("manifest has no index series");
  ctx.write_series_panel("data.csv", panel);

  std::string prov;
  for (const auto& c : ctx.comments()) prov += "# " + c + "\n";
  prov += set.provenance_report();
  ctx.write_text(ctx.file("provenance.csv"), prov);
}

// ---- ucsv ----

void stage_ucsv(Ctx& ctx) {
  auto d = read_data(ctx);
  UcsvConfig c = ctx.cfg.ucsv;
  c.seed = ctx.cfg.seed;
  auto post = estimate_ucsv(d.inflation.renamed("pi"), c);
  ctx.write_series_panel("ucsv.csv", {post.pi.renamed("pi"), post.trend.renamed("trend"), post.gap.renamed("gap"),
                                      post.sigma_eta.renamed("sigma_eta"), post.sigma_eps.renamed("sigma_eps")});
}

// ---- unitroot ----

void stage_unitroot(Ctx& ctx) {
  auto in = read_inputs(ctx);
  std::vector<TimeSeries> vars{in.inflation, in.uncertainty};
  if (ctx.cfg.with_output) vars.push_back(*in.output);
  for (const auto& s : in.indexes) vars.push_back(s);

  Table t{{"variable", "form", "test", "statistic", "lags", "nobs", "cv1", "cv5", "cv10", "stars"}, {}};
  for (const auto& s : vars) {
    for (const bool differenced : {false, true}) {
      const TimeSeries x = differenced ? diff(s) : s;
      AdfOptions a;
      a.spec = ctx.cfg.unitroot_spec;
      a.max_lags = ctx.cfg.unitroot_max_lag;
      PpOptions p;
      p.spec = ctx.cfg.unitroot_spec;
      p.bandwidth = ctx.cfg.bandwidth;
      for (const auto& [name, r] : {std::pair{"ADF", adf_test(x, a)}, std::pair{"PP", pp_test(x, p)}}) {
        t.rows.push_back({s.id(), differenced ? "diff" : "level", name, num(r.statistic),
                          std::to_string(r.lags_or_bandwidth), std::to_string(r.nobs), num(r.critical_values.pct1),
                          num(r.critical_values.pct5), num(r.critical_values.pct10), stars(r.reject_at)});
      }
    }
  }
  ctx.write("unitroot.csv", t);
}

// ---- gh ----

void stage_gh(Ctx& ctx) {
  auto in = read_inputs(ctx);
  const auto X = in.regressors(ctx.cfg.with_output);
  GhOptions opts;
  opts.trim = ctx.cfg.trim;
  opts.bandwidth = ctx.cfg.bandwidth;
  opts.max_lag = ctx.cfg.gh_max_lag;
  DecisionRule rule{level_from_fraction(ctx.cfg.decision_level), ctx.cfg.decision_required};

  std::vector<std::vector<GhResult>> results(in.indexes.size());
  run_replications(static_cast<int>(in.indexes.size()), ctx.cfg.threads, [&](int i) {
    auto& out = results[static_cast<std::size_t>(i)];
    for (auto model : kAllModels) out.push_back(gh_test(in.indexes[static_cast<std::size_t>(i)], X, model, opts));
    return 0.0;
  });

  Table gh{{"index", "model", "statistic", "value", "break_date", "lag", "cv1", "cv5", "cv10", "stars"}, {}};
  Table dec{{"index", "cointegrated", "passing", "representative"}, {}};
  for (std::size_t i = 0; i < in.indexes.size(); ++i) {
    for (const auto& r : results[i]) {
      for (auto s : {GhStatistic::adf, GhStatistic::zt, GhStatistic::za}) {
        const auto& st = r.stat(s);
        gh.rows.push_back({in.indexes[i].id(), model_code(r.model), statistic_name(s), num(st.statistic),
                           st.break_date.label(), s == GhStatistic::adf ? std::to_string(st.lag) : "",
                           num(st.critical_values.pct1), num(st.critical_values.pct5), num(st.critical_values.pct10),
                           stars(st.reject_at)});
      }
    }
    auto d = decide(results[i], rule);
    std::string passing;
    for (auto m : d.passing) passing += (passing.empty() ? "" : ";") + model_code(m);
    dec.rows.push_back({in.indexes[i].id(), d.cointegrated ? "yes" : "no", passing,
                        d.representative ? model_code(*d.representative) : ""});
  }
  ctx.write("gh.csv", gh);
  ctx.write("decisions.csv", dec);
}

struct DecisionRow {
  std::string index;
  bool cointegrated = false;
  std::vector<GhModel> passing;
  std::optional<GhModel> representative;
};

std::vector<DecisionRow> read_decisions(const Ctx& ctx) {
  auto t = ctx.read("decisions.csv");
  std::vector<DecisionRow> out;
  for (const auto& r : t.rows) {
    DecisionRow d;
    d.index = r[t.col("index")];
    d.cointegrated = r[t.col("cointegrated")] == "yes";
    const auto& p = r[t.col("passing")];
    std::size_t pos = 0;
    while (pos < p.size()) {
      auto next = p.find(';', pos);
      d.passing.push_back(parse_model(p.substr(pos, next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (!r[t.col("representative")].empty()) d.representative = parse_model(r[t.col("representative")]);
    out.push_back(std::move(d));
  }
  return out;
}

// ---- fit ----

void stage_fit(Ctx& ctx) {
  auto in = read_inputs(ctx);
  const auto X = in.regressors(ctx.cfg.with_output);
  auto gh = ctx.read("gh.csv");
  std::map<std::pair<std::string, std::string>, MonthIndex> zt_break;
  for (const auto& r : gh.rows)
    if (r[gh.col("statistic")] == statistic_name(GhStatistic::zt))
      zt_break[{r[gh.col("index")], r[gh.col("model")]}] = MonthIndex::parse(r[gh.col("break_date")]);

  Table fit{{"index", "model", "break_date", "term", "coef", "se", "t", "p", "stars", "r_squared", "nobs"}, {}};
  Table wald{{"index", "model", "restriction", "statistic", "df", "p", "stars"}, {}};
  Table resid{{"index", "model", "date", "value"}, {}};
  for (const auto& d : read_decisions(ctx)) {
    if (!d.cointegrated) continue;
    const auto& y = in.index(d.index);
    for (auto model : d.passing) {
      const auto bd = zt_break.at({d.index, model_code(model)});
      auto f = fit_break_regression(y, X, model, bd);
      const int df = f.nobs - static_cast<int>(f.coef.size());
      for (Eigen::Index j = 0; j < f.coef.size(); ++j) {
        const double t = f.coef(j) / f.se(j);
        const double p = two_sided_p(t, df);
        fit.rows.push_back({d.index, model_code(model), bd.label(), f.names[static_cast<std::size_t>(j)], num(f.coef(j)),
                            num(f.se(j)), num(t), num(p), stars_from_p(p), num(f.r_squared), std::to_string(f.nobs)});
      }
      if (has_slope_break(model)) {
        auto [R, r] = post_break_slope_restriction(f);
        auto joint = wald_test(f, R, r);
        wald.rows.push_back({d.index, model_code(model), "all post-break slopes = 0", num(joint.statistic),
                             std::to_string(joint.df), num(joint.p_value), stars_from_p(joint.p_value)});
        for (Eigen::Index i = 0; i < R.rows(); ++i) {
          auto w = wald_test(f, R.row(i), r.segment(i, 1));
          const auto& name = X[static_cast<std::size_t>(i)].id();
          wald.rows.push_back({d.index, model_code(model), fmt::format("{} + Dum x {} = 0", name, name),
                               num(w.statistic), std::to_string(w.df), num(w.p_value), stars_from_p(w.p_value)});
        }
      }
      if (d.representative && *d.representative == model)
        for (std::size_t t = 0; t < f.residuals.size(); ++t)
          resid.rows.push_back({d.index, model_code(model), f.residuals.date_at(t).iso(), exact(f.residuals[t])});
    }
  }
  ctx.write("fit.csv", fit);
  ctx.write("wald.csv", wald);
  ctx.write("residuals.csv", resid);
}

// ---- ecm / cusum ----

struct EcmRun {
  std::string index;
  GhModel model;
  EcmFit fit;
};

std::vector<EcmRun> ecm_fits(const Ctx& ctx) {
  auto in = read_inputs(ctx);
  auto rt = ctx.read("residuals.csv");
  std::map<std::string, std::pair<MonthIndex, std::vector<double>>> resid;
  for (const auto& r : rt.rows) {
    auto& e = resid[r[rt.col("index")]];
    if (e.second.empty()) e.first = MonthIndex::parse(r[rt.col("date")]);
    e.second.push_back(to_double(r[rt.col("value")]));
  }
  EcmOptions opts;
  opts.difference_lags = ctx.cfg.ecm_difference_lags;
  std::vector<EcmRun> out;
  for (const auto& d : read_decisions(ctx)) {
    if (!d.cointegrated) continue;
    auto it = resid.find(d.index);
    if (it == resid.end()) throw ConfigError(fmt::format("residuals.csv has no residuals for {}", d.index));
    TimeSeries e("ECM", it->second.first, it->second.second);
    std::optional<TimeSeries> ip;
    if (ctx.cfg.with_output) ip = in.output;
    out.push_back({d.index, *d.representative,
                   fit_ecm(in.index(d.index), in.inflation, in.uncertainty, e, ip, opts)});
  }
  return out;
}

void stage_ecm(Ctx& ctx) {
  Table t{{"index", "model", "term", "coef", "se", "t", "p", "stars", "r_squared", "nobs"}, {}};
  for (const auto& run : ecm_fits(ctx)) {
    const auto& f = run.fit;
    const int df = f.nobs - static_cast<int>(f.coef.size());
    for (Eigen::Index j = 0; j < f.coef.size(); ++j) {
      const double tv = f.coef(j) / f.se(j);
      const double p = two_sided_p(tv, df);
      t.rows.push_back({run.index, model_code(run.model), f.names[static_cast<std::size_t>(j)], num(f.coef(j)),
                        num(f.se(j)), num(tv), num(p), stars_from_p(p), num(f.r_squared), std::to_string(f.nobs)});
    }
  }
  ctx.write("ecm.csv", t);
}

void stage_cusum(Ctx& ctx) {
  Table paths{{"index", "kind", "date", "statistic", "lower", "upper"}, {}};
  Table summary{{"index", "kind", "level", "critical", "breached", "first_breach"}, {}};
  const double level = ctx.cfg.cusum_level;
  for (const auto& run : ecm_fits(ctx)) {
    auto rr = recursive_residuals(run.fit.y, run.fit.X);
    for (const auto& p : {cusum(rr.w, rr.k, rr.n, level), cusum_sq(rr.w, rr.k, rr.n, level)}) {
      const std::string kind = p.kind == CusumKind::cusum ? "CUSUM" : "CUSUM-SQ";
      for (std::size_t i = 0; i < p.r.size(); ++i)
        paths.rows.push_back({run.index, kind, run.fit.first.plus(p.r[i] - 1).label(), num(p.statistic[i]),
                              num(p.lower[i]), num(p.upper[i])});
      summary.rows.push_back({run.index, kind, num(level), num(p.critical), p.breached ? "yes" : "no",
                              p.first_breach ? run.fit.first.plus(*p.first_breach - 1).label() : ""});
    }
  }
  ctx.write("cusum.csv", paths);
  ctx.write("cusum_summary.csv", summary);
}

// ---- var ----

void stage_var(Ctx& ctx) {
  auto in = read_inputs(ctx);
  Table coef{{"index", "equation", "term", "coef", "se", "t", "p", "stars", "r_squared", "nobs"}, {}};
  Table summary{{"index", "p", "nobs", "spectral_radius", "stable"}, {}};
  for (const auto& d : read_decisions(ctx)) {
    if (d.cointegrated) continue;
    std::vector<TimeSeries> vars{in.index(d.index)};
    for (const auto& x : in.regressors(ctx.cfg.with_output)) vars.push_back(x);
    auto f = fit_var_diff(vars, ctx.cfg.var_lags);
    const int df = f.nobs - (1 + f.k * f.p);
    for (int e = 0; e < f.k; ++e) {
      auto row = [&](const std::string& term, double c, double se) {
        const double t = c / se;
        const double p = two_sided_p(t, df);
        coef.rows.push_back({d.index, f.names[static_cast<std::size_t>(e)], term, num(c), num(se), num(t), num(p),
                             stars_from_p(p), num(f.r_squared(e)), std::to_string(f.nobs)});
      };
      row("C", f.intercept(e), f.intercept_se(e));
      for (int l = 0; l < f.p; ++l)
        for (int j = 0; j < f.k; ++j)
          row(fmt::format("{}(-{})", f.names[static_cast<std::size_t>(j)], l + 1), f.lags[static_cast<std::size_t>(l)](e, j),
              f.lag_se[static_cast<std::size_t>(l)](e, j));
    }
    summary.rows.push_back({d.index, std::to_string(f.p), std::to_string(f.nobs), num(f.spectral_radius),
                            f.stable ? "yes" : "no"});
  }
  ctx.write("var.csv", coef);
  ctx.write("var_summary.csv", summary);
}

// ---- report ----

std::string fmt2(const std::string& v, const std::string& st = "") {
  if (v == "nan") return "n/a";
  return fmt::format("{:.3f}{}", std::stod(v), st);
}

std::string md_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = "|";
  for (const auto& h : header) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i ? "---:|" : "---|";
  out += "\n";
  for (const auto& r : rows) {
    out += "|";
    for (const auto& c : r) out += " " + c + " |";
    out += "\n";
  }
  return out + "\n";
}

void stage_report(Ctx& ctx) {
  auto in = read_inputs(ctx);
  const auto X = in.regressors(ctx.cfg.with_output);
  std::string md;
  md += "# Stock prices, inflation and inflation uncertainty\n\n";
  md += fmt::format("- config hash: `{}`\n", ctx.hash);
  md += fmt::format("- seed: {}\n", ctx.cfg.seed);
  md += fmt::format("- versions: ucoint {}, Eigen {}.{}.{}, fmt {}.{}.{}\n", kVersion, EIGEN_WORLD_VERSION,
                    EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION, FMT_VERSION / 10000, FMT_VERSION / 100 % 100,
                    FMT_VERSION % 100);
  md += fmt::format("- sample: {} to {} ({} months)\n", in.inflation.start().label(), in.inflation.end().label(),
                    in.inflation.size());
  std::string reg;
  for (const auto& x : X) reg += (reg.empty() ? "" : ", ") + x.id();
  md += fmt::format("- regressors: {}\n", reg);
  md += fmt::format("- UC-SV: gamma = {}, {} draws, {} burn-in\n\n", ctx.cfg.ucsv.gamma, ctx.cfg.ucsv.n_draws,
                    ctx.cfg.ucsv.burn_in);
  md += "*, ** and *** denote significance at 10%, 5% and 1%. Break dates are the last month before the dummy "
        "switches on.\n\n";

  {
    auto t = ctx.read("unitroot.csv");
    std::map<std::string, std::map<std::string, std::string>> cells;
    std::vector<std::string> order;
    for (const auto& r : t.rows) {
      const auto& v = r[t.col("variable")];
      if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
      cells[v][r[t.col("test")] + " " + r[t.col("form")]] = fmt2(r[t.col("statistic")], r[t.col("stars")]);
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : order)
      rows.push_back({v, cells[v]["ADF level"], cells[v]["PP level"], cells[v]["ADF diff"], cells[v]["PP diff"]});
    md += "## Unit root tests\n\n" + md_table({"Variable", "ADF level", "PP level", "ADF first diff", "PP first diff"}, rows);
  }
  {
    auto t = ctx.read("gh.csv");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < t.rows.size(); i += 3) {
      std::vector<std::string> row{t.rows[i][t.col("index")], "GH-" + t.rows[i][t.col("model")]};
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& r = t.rows[i + k];
        row.push_back(fmt2(r[t.col("value")], r[t.col("stars")]) + " (" + r[t.col("break_date")] + ")");
      }
      rows.push_back(row);
    }
    md += "## Gregory-Hansen cointegration tests\n\n" + md_table({"Index", "Model", "ADF* (break)", "Zt* (break)", "Za* (break)"}, rows);
    md += fmt::format("Critical values for m = {} regressors.\n\n", X.size());
  }
  const auto decisions = read_decisions(ctx);
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& d : decisions) {
      std::string passing;
      for (auto m : d.passing) passing += (passing.empty() ? "" : ", ") + model_name(m);
      rows.push_back({d.index, d.cointegrated ? "yes" : "no", passing.empty() ? "-" : passing,
                      d.representative ? model_name(*d.representative) : "-"});
    }
    md += fmt::format("## Cointegration decisions\n\nA model passes when at least {} of its 3 statistics reject at "
                      "{:g}%.\n\n",
                      ctx.cfg.decision_required, 100.0 * ctx.cfg.decision_level);
    md += md_table({"Index", "Cointegrated", "Passing models", "Representative"}, rows);
  }
  {
    auto t = ctx.read("fit.csv");
    md += "## Cointegration equations\n\n";
    if (t.rows.empty()) md += "No index is cointegrated.\n\n";
    std::string current;
    std::vector<std::vector<std::string>> rows;
    auto flush = [&] {
      if (!rows.empty()) md += md_table({"Term", "Coefficient", "Std. error"}, rows);
      rows.clear();
    };
    for (const auto& r : t.rows) {
      const auto key = r[t.col("index")] + " GH-" + r[t.col("model")] + " (Dum " + r[t.col("break_date")] + ")";
      if (key != current) {
        flush();
        current = key;
        md += fmt::format("### {}\n\nR² = {}, n = {}\n\n", key, fmt2(r[t.col("r_squared")]), r[t.col("nobs")]);
      }
      rows.push_back({r[t.col("term")], fmt2(r[t.col("coef")], r[t.col("stars")]), "(" + fmt2(r[t.col("se")]) + ")"});
    }
    flush();

    auto w = ctx.read("wald.csv");
    if (!w.rows.empty()) {
      std::vector<std::vector<std::string>> wr;
      for (const auto& r : w.rows)
        wr.push_back({r[w.col("index")], "GH-" + r[w.col("model")], r[w.col("restriction")],
                      fmt2(r[w.col("statistic")], r[w.col("stars")]), r[w.col("df")], fmt2(r[w.col("p")])});
      md += "### Wald tests of post-break slopes\n\n" + md_table({"Index", "Model", "Restriction", "Chi-square", "df", "p"}, wr);
    }

    // Long-run sign check for GH-LST equations.
    std::vector<std::vector<std::string>> sr;
    for (const auto& r : t.rows) {
      if (r[t.col("model")] != "LST") continue;
      const auto& term = r[t.col("term")];
      if (term != "I" && term != "U") continue;
      sr.push_back({r[t.col("index")], term, fmt2(r[t.col("coef")], r[t.col("stars")]),
                    to_double(r[t.col("coef")]) < 0 ? "negative" : "non-negative"});
    }
    if (!sr.empty()) md += "### Long-run signs of I and U in GH-LST equations\n\n" + md_table({"Index", "Term", "Coefficient", "Sign"}, sr);
  }
  {
    auto t = ctx.read("ecm.csv");
    md += "## Error correction models\n\n";
    if (t.rows.empty()) {
      md += "No error correction model was estimated.\n\n";
    } else {
      std::vector<std::string> indexes, terms;
      std::map<std::string, std::map<std::string, std::string>> cell;
      std::map<std::string, std::string> r2;
      for (const auto& r : t.rows) {
        const auto& ix = r[t.col("index")];
        const auto& term = r[t.col("term")];
        if (std::find(indexes.begin(), indexes.end(), ix) == indexes.end()) indexes.push_back(ix);
        if (std::find(terms.begin(), terms.end(), term) == terms.end()) terms.push_back(term);
        cell[term][ix] = fmt2(r[t.col("coef")], r[t.col("stars")]);
        r2[ix] = fmt2(r[t.col("r_squared")]);
      }
      std::vector<std::string> header{"Term"};
      header.insert(header.end(), indexes.begin(), indexes.end());
      std::vector<std::vector<std::string>> rows;
      for (const auto& term : terms) {
        std::vector<std::string> row{term};
        for (const auto& ix : indexes) row.push_back(cell[term].count(ix) ? cell[term][ix] : "");
        rows.push_back(row);
      }
      std::vector<std::string> last{"R²"};
      for (const auto& ix : indexes) last.push_back(r2[ix]);
      rows.push_back(last);
      md += md_table(header, rows);
    }
  }
  {
    auto t = ctx.read("var.csv");
    auto s = ctx.read("var_summary.csv");
    md += fmt::format("## First-differenced VAR({}) for non-cointegrated indexes\n\n", ctx.cfg.var_lags);
    if (t.rows.empty()) md += "Every index is cointegrated; no VAR was estimated.\n\n";
    for (const auto& sr : s.rows) {
      const auto& ix = sr[s.col("index")];
      const std::string eq = "d" + ix;
      std::vector<std::vector<std::string>> rows;
      std::string r2;
      for (const auto& r : t.rows)
        if (r[t.col("index")] == ix && r[t.col("equation")] == eq) {
          rows.push_back({r[t.col("term")], fmt2(r[t.col("coef")], r[t.col("stars")]), "(" + fmt2(r[t.col("se")]) + ")"});
          r2 = fmt2(r[t.col("r_squared")]);
        }
      rows.push_back({"R²", r2, ""});
      md += fmt::format("### {} equation (spectral radius {}, {})\n\n", eq, fmt2(sr[s.col("spectral_radius")]),
                        sr[s.col("stable")] == "yes" ? "stable" : "not stable");
      md += md_table({"Term", "Coefficient", "Std. error"}, rows);
    }
  }
  {
    auto t = ctx.read("cusum_summary.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.rows)
      rows.push_back({r[t.col("index")], r[t.col("kind")], r[t.col("breached")],
                      r[t.col("first_breach")].empty() ? "-" : r[t.col("first_breach")]});
    md += fmt::format("## Parameter stability of the ECMs ({:g}% bounds)\n\n", 100.0 * ctx.cfg.cusum_level);
    md += rows.empty() ? std::string("No error correction model was estimated.\n\n")
                       : md_table({"Index", "Test", "Breached", "First breach"}, rows);
  }
  ctx.write_text(ctx.file("summary.md"), md);
}

void dispatch(Ctx& ctx) {
  switch (ctx.stage) {
    case Stage::fetch: return stage_fetch(ctx);
    case Stage::ucsv: return stage_ucsv(ctx);
    case Stage::unitroot: return stage_unitroot(ctx);
    case Stage::gh: return stage_gh(ctx);
    case Stage::fit: return stage_fit(ctx);
    case Stage::ecm: return stage_ecm(ctx);
    case Stage::var: return stage_var(ctx);
    case Stage::cusum: return stage_cusum(ctx);
    case Stage::report: return stage_report(ctx);
  }
}

void remove_all(const std::vector<fs::path>& files) {
  std::error_code ec;
  for (const auto& f : files) fs::remove(f, ec);
}

}  // namespace

std::vector<fs::path> run_stage(Stage stage, const PipelineConfig& cfg, const StageIo& io) {
  Ctx ctx{cfg, io, cfg.hash(), stage, {}};
  try {
    fs::create_directories(cfg.output_dir);
    dispatch(ctx);
  } catch (const StageError&) {
    remove_all(ctx.written);
    throw;
  } catch (const std::exception& e) {
    remove_all(ctx.written);
    throw StageError(stage_name(stage), e.what());
  }
  return ctx.written;
}

std::vector<fs::path> run_pipeline(const PipelineConfig& cfg, const StageIo& io) {
  std::vector<fs::path> written;
  for (auto s : all_stages()) {
    try {
      auto w = run_stage(s, cfg, io);
      written.insert(written.end(), w.begin(), w.end());
    } catch (...) {
      remove_all(written);
      throw;
    }
  }
  return written;
}

}  // namespace ucoint
