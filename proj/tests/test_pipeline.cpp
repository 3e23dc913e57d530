#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/pipeline.hpp"

using namespace ucoint;
namespace fs = std::filesystem;

namespace {

// Copies the demo inputs (not its outputs) into a scratch directory.
void copy_demo(const fs::path& to) {
  const fs::path from = fs::path(UCOINT_SOURCE_DIR) / "data" / "demo";
  for (const auto& e : fs::directory_iterator(from))
    if (e.is_regular_file()) fs::copy_file(e.path(), to / e.path().filename(), fs::copy_options::overwrite_existing);
}

PipelineConfig config_in(const fs::path& dir, const std::string& out, const std::string& extra = {}) {
  return PipelineConfig::parse(R"({"manifest":"manifest.json","output_dir":")" + out +
                                   R"(","seed":7,"ucsv":{"n_draws":400,"burn_in":100})" + extra + "}",
                               dir);
}

std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config requires a seed and rejects unknown keys") {
    CHECK_THROWS_AS(PipelineConfig::parse(R"({"manifest":"m.json"})", "."), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse(R"({"manifest":"m.json","seed":1,"sed":2})", "."), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse(R"({"manifest":"m.json","seed":1,"ucsv":{"gama":1}})", "."), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse(R"({"manifest":"m.json","seed":1,"trim":[0.9,0.1]})", "."), ConfigError);
  }

  TEST_CASE("hash tracks results, not locations") {
    testing::TempDir dir("hash");
    copy_demo(dir.path());
    auto a = config_in(dir.path(), "out1");
    auto b = config_in(dir.path(), "out2", R"(,"threads":3)");
    auto c = config_in(dir.path(), "out1", R"(,"with_output":true)");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
  }

  TEST_CASE("staged runs reproduce the one-shot run") {
    testing::TempDir dir("staged");
    copy_demo(dir.path());
    auto one = config_in(dir.path(), "one");
    auto staged = config_in(dir.path(), "staged");
    run_pipeline(one);
    for (auto s : all_stages()) run_stage(s, staged);
    const auto names = files_in(one.output_dir);
    REQUIRE(names == files_in(staged.output_dir));
    CHECK(names.size() >= 10);
    for (const auto& n : names) {
      INFO(n.string());
      CHECK(testing::slurp(one.output_dir / n) == testing::slurp(staged.output_dir / n));
    }
    const auto summary = testing::slurp(one.output_dir / "summary.md");
    CHECK(summary.find(one.hash()) != std::string::npos);
  }

  TEST_CASE("output growth toggle adds the IP regressor") {
    testing::TempDir dir("ip");
    copy_demo(dir.path());
    auto with = config_in(dir.path(), "with", R"(,"with_output":true)");
    auto without = config_in(dir.path(), "without");
    for (auto s : {Stage::fetch, Stage::ucsv, Stage::unitroot, Stage::gh, Stage::fit}) {
      run_stage(s, with);
      run_stage(s, without);
    }
    CHECK(testing::slurp(with.output_dir / "fit.csv").find(",IP,") != std::string::npos);
    CHECK(testing::slurp(without.output_dir / "fit.csv").find(",IP,") == std::string::npos);
  }

  TEST_CASE("inputs from a different configuration are refused") {
    testing::TempDir dir("mix");
    copy_demo(dir.path());
    auto a = config_in(dir.path(), "out");
    auto b = config_in(dir.path(), "out", R"(,"with_output":true)");
    run_stage(Stage::fetch, a);
    try {
      run_stage(Stage::ucsv, b);
      FAIL("expected refusal");
    } catch (const StageError& e) {
      CHECK(e.stage() == "ucsv");
      CHECK(std::string(e.what()).find("refusing to mix") != std::string::npos);
    }
  }

  TEST_CASE("a failing stage leaves no partial output") {
    testing::TempDir dir("fail");
    copy_demo(dir.path());
    fs::remove(dir.path() / "ENERGY.csv");
    auto cfg = config_in(dir.path(), "out");
    try {
      run_pipeline(cfg);
      FAIL("expected failure");
    } catch (const StageError& e) {
      CHECK(e.stage() == "fetch");
    }
    CHECK(files_in(cfg.output_dir).empty());

    // A later stage failing also removes what earlier stages wrote in the same run.
    copy_demo(dir.path());
    std::ofstream(dir.path() / "ENERGY.csv") << "date,value\n2002-07,1\n";
    try {
      run_pipeline(cfg);
      FAIL("expected failure");
    } catch (const StageError&) {
    }
    CHECK(files_in(cfg.output_dir).empty());
  }
}
