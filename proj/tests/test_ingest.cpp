#include <doctest.h>

#include <fstream>

#include <fmt/format.h>

#include "helpers.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/ingest.hpp"

using namespace ucoint;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream o(p);
  o << text;
}

std::string fred_body(MonthIndex from, int n, double base = 100.0) {
  std::string obs;
  for (int i = 0; i < n; ++i)
    obs += fmt::format(R"({}{{"realtime_start":"2020-01-01","date":"{}-01","value":"{}"}})", i ? "," : "",
                       from.plus(i).iso(), base + i);
  return R"({"observation_start":"x","observations":[)" + obs + "]}";
}

class StubTransport : public Transport {
public:
  HttpResponse response;
  int calls = 0;
  std::string last_query;
  HttpResponse get(const std::string& host, const std::string& q) override {
    ++calls;
    last_query = host + q;
    return response;
  }
};

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("two-row file") {
    testing::TempDir dir("csv");
    write_file(dir.path() / "a.csv", "date,value\n2002-07,100\n2002-08,101\n");
    auto s = load_csv(dir.path() / "a.csv");
    CHECK(s.size() == 2);
    CHECK(s.start() == MonthIndex(2002, 7));
    CHECK(s.id() == "a");
    CHECK(s[1] == 101.0);
  }

  TEST_CASE("rows are sorted and comments skipped") {
    testing::TempDir dir("csv");
    write_file(dir.path() / "a.csv", "# note\ndate,other,value\n2002-09,x,3\n2002-07,y,1\n2002-08,z,2\n");
    auto s = load_csv(dir.path() / "a.csv");
    CHECK(s.start() == MonthIndex(2002, 7));
    CHECK(s[2] == 3.0);
  }

  TEST_CASE("gaps, duplicates and bad rows") {
    testing::TempDir dir("csv");
    write_file(dir.path() / "gap.csv", "date,value\n2002-07,1\n2002-08,2\n2002-10,4\n");
    try {
      load_csv(dir.path() / "gap.csv");
      FAIL("expected GapError");
    } catch (const GapError& e) {
      CHECK(std::string(e.what()).find("2002M9") != std::string::npos);
    }
    write_file(dir.path() / "dup.csv", "date,value\n2002-07,1\n2002-07,2\n");
    CHECK_THROWS_AS(load_csv(dir.path() / "dup.csv"), ParseError);
    write_file(dir.path() / "bad.csv", "date,value\n2002-07,1\n2002-08,abc\n");
    try {
      load_csv(dir.path() / "bad.csv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    write_file(dir.path() / "nocol.csv", "when,value\n2002-07,1\n");
    CHECK_THROWS_AS(load_csv(dir.path() / "nocol.csv"), ParseError);
  }

  TEST_CASE("write then load round-trips exactly") {
    testing::TempDir dir("rt");
    Rng rng = make_rng(1);
    for (int rep = 0; rep < 20; ++rep) {
      auto s = testing::series("x", testing::normal_vector(rng, 50, 1e3) / 7.0, {1990, 1 + rep % 12});
      write_csv(dir.path() / "x.csv", s, {"config_hash=abc"});
      CHECK(load_csv(dir.path() / "x.csv") == s);
      auto t = testing::series("y", testing::normal_vector(rng, 50), s.start());
      write_panel(dir.path() / "p.csv", {s, t});
      auto back = load_panel(dir.path() / "p.csv");
      CHECK(back[0] == s);
      CHECK(back[1] == t);
    }
    auto comments = read_csv_comments(dir.path() / "x.csv");
    REQUIRE(comments.size() == 1);
    CHECK(comments[0] == std::pair<std::string, std::string>{"config_hash", "abc"});
  }

  TEST_CASE("FRED observations over the study window") {
    testing::TempDir dir("fred");
    auto stub = std::make_shared<StubTransport>();
    stub->response = {200, fred_body({2002, 7}, 160)};
    FredClient client(stub, dir.path());
    Window w{{2002, 7}, {2015, 10}};
    auto s = client.fetch("CPIAUCSL", "key", w);
    CHECK(s.size() == 160);
    CHECK(s.start() == MonthIndex(2002, 7));
    CHECK(stub->last_query.find("series_id=CPIAUCSL") != std::string::npos);
    CHECK(stub->last_query.find("file_type=json") != std::string::npos);
    CHECK(stub->last_query.find("observation_start=2002-07-01") != std::string::npos);
    CHECK(fs::exists(client.cache_path("CPIAUCSL", w)));
    // Cache hit: no network call, even without a key.
    auto again = client.fetch("CPIAUCSL", "", w);
    CHECK(stub->calls == 1);
    CHECK(again == s);
  }

  TEST_CASE("FRED error handling") {
    auto stub = std::make_shared<StubTransport>();
    FredClient client(stub, {});
    Window w{{2002, 7}, {2003, 6}};
    stub->response = {400, R"({"error_code":400,"error_message":"Bad Request.  The value for variable api_key is not registered."})"};
    try {
      client.fetch("CPIAUCSL", "bad", w);
      FAIL("expected AuthError");
    } catch (const AuthError& e) {
      CHECK(std::string(e.what()).find("not registered") != std::string::npos);
    }
    stub->response = {500, "oops"};
    try {
      client.fetch("CPIAUCSL", "k", w);
      FAIL("expected TransportError");
    } catch (const TransportError& e) {
      CHECK(std::string(e.what()).find("500") != std::string::npos);
    }
    stub->response = {200, R"({"observations":[{"date":"2002-07-01","value":"1"},{"date":"2002-08-01","value":"."}]})"};
    CHECK_THROWS_AS(client.fetch("CPIAUCSL", "k", w), GapError);
    CHECK_THROWS_AS(client.fetch("CPIAUCSL", "", w), AuthError);
  }

  TEST_CASE("materialize aligns and windows") {
    testing::TempDir dir("man");
    auto write_series = [&](const std::string& name, MonthIndex start, int n) {
      std::vector<double> v;
      for (int i = 0; i < n; ++i) v.push_back(100.0 + i);
      write_csv(dir.path() / name, TimeSeries(name, start, v));
    };
    write_series("a.csv", {2002, 7}, 30);
    write_series("b.csv", {2002, 7}, 30);
    auto m = DatasetManifest::parse(R"({"window":{"start":"2002-07","end":"2004-12"},"series":[
      {"id":"A","source":"csv","location":"a.csv"},{"id":"B","source":"csv","location":"b.csv"}]})",
                                    dir.path());
    auto set = materialize(m);
    CHECK(set.at("A") == load_csv(dir.path() / "a.csv", "date", "value", "A"));

    // Mixed FRED and CSV with offset windows: the common window is the intersection.
    auto stub = std::make_shared<StubTransport>();
    stub->response = {200, fred_body({2002, 1}, 20)};  // 2002M1..2003M8
    MaterializeOptions opts{std::make_shared<FredClient>(stub, fs::path{}), "key"};
    auto mixed = DatasetManifest::parse(R"({"window":{"start":"2001-01","end":"2010-12"},"series":[
      {"id":"F","source":"fred","location":"X"},{"id":"A","source":"csv","location":"a.csv"}]})",
                                        dir.path());
    auto ms = materialize(mixed, opts);
    CHECK(ms.series[0].start() == MonthIndex(2002, 7));
    CHECK(ms.series[0].end() == MonthIndex(2003, 8));
    CHECK(ms.series[1].start() == ms.series[0].start());
    CHECK(ms.series[1].size() == ms.series[0].size());
    CHECK(ms.provenance_report() == materialize(mixed, opts).provenance_report());

    // yoy on 160 raw rows leaves 148.
    write_series("raw.csv", {2000, 1}, 160);
    auto yoy = DatasetManifest::parse(R"({"window":{"start":"1990-01","end":"2030-12"},"series":[
      {"id":"R","source":"csv","location":"raw.csv","transform":"yoy"}]})",
                                      dir.path());
    auto ys = materialize(yoy);
    CHECK(ys.series[0].size() == 148);
    CHECK(ys.provenance[0].raw_rows == 160);

    auto empty = DatasetManifest::parse(R"({"window":{"start":"2020-01","end":"2020-12"},"series":[
      {"id":"A","source":"csv","location":"a.csv"}]})",
                                        dir.path());
    CHECK_THROWS_AS(materialize(empty), RangeError);
  }

  TEST_CASE("manifest validation and round trip") {
    CHECK_THROWS_AS(DatasetManifest::parse(R"({"window":{"start":"2002-07","end":"2002-01"},"series":[
      {"id":"A","source":"csv","location":"a.csv"}]})", "."), ConfigError);
    CHECK_THROWS_AS(DatasetManifest::parse(R"({"window":{"start":"2002-01","end":"2002-07"},"series":[
      {"id":"A","source":"csv","location":"a.csv"},{"id":"A","source":"csv","location":"b.csv"}]})", "."), ConfigError);
    CHECK_THROWS_AS(DatasetManifest::parse(R"({"window":{"start":"2002-01","end":"2002-07"},"series":[
      {"id":"A","source":"ftp","location":"a.csv"}]})", "."), ConfigError);
    auto m = DatasetManifest::parse(R"({"window":{"start":"2002-01","end":"2002-07"},"series":[
      {"id":"A","source":"fred","location":"CPIAUCSL","transform":"yoy","role":"cpi"}]})", ".");
    CHECK(DatasetManifest::parse(m.to_json(), ".").to_json() == m.to_json());
  }
}
