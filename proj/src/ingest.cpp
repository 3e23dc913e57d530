#include "ucoint/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "ucoint/errors.hpp"

namespace ucoint {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const fs::path& path, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ParseError(fmt::format("{}:{}: cannot parse '{}' as a number", path.string(), line, text));
  return v;
}

std::string format_value(double v) { return fmt::format("{:.17g}", v); }

struct Row {
  MonthIndex date;
  std::vector<double> values;
  int line;
};

// Sorts rows, rejects duplicates and gaps.
void check_contiguous(std::vector<Row>& rows, const fs::path& path) {
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int step = months_between(rows[i - 1].date, rows[i].date);
    if (step == 0)
      throw ParseError(fmt::format("{}: duplicate date {} (lines {} and {})", path.string(), rows[i].date.iso(),
                                   rows[i - 1].line, rows[i].line));
    if (step > 1) {
      std::string missing = rows[i - 1].date.next().label();
      if (step > 2) missing += fmt::format("..{}", rows[i].date.plus(-1).label());
      throw GapError(fmt::format("{}: missing month(s) {} between {} and {}", path.string(), missing,
                                 rows[i - 1].date.label(), rows[i].date.label()));
    }
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

Table read_table(const fs::path& path, const std::vector<std::string>& wanted_columns, bool all_columns) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  std::string line;
  int lineno = 0;
  Table t;
  std::vector<std::size_t> cols;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty() || line[0] == '#') continue;
    auto cells = split_csv(line);
    if (t.header.empty()) {
      t.header = cells;
      if (all_columns) {
        for (std::size_t j = 0; j < cells.size(); ++j) cols.push_back(j);
      } else {
        for (const auto& w : wanted_columns) {
          auto it = std::find(cells.begin(), cells.end(), w);
          if (it == cells.end()) throw ParseError(fmt::format("{}: no column named '{}'", path.string(), w));
          cols.push_back(static_cast<std::size_t>(it - cells.begin()));
        }
      }
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError(fmt::format("{}:{}: expected {} fields, found {}", path.string(), lineno, t.header.size(),
                                   cells.size()));
    Row r;
    r.line = lineno;
    try {
      r.date = MonthIndex::parse(cells[cols[0]]);
    } catch (const Error&) {
      throw ParseError(fmt::format("{}:{}: cannot parse date '{}'", path.string(), lineno, cells[cols[0]]));
    }
    for (std::size_t j = 1; j < cols.size(); ++j) r.values.push_back(parse_number(cells[cols[j]], path, lineno));
    t.rows.push_back(std::move(r));
  }
  if (t.header.empty()) throw ParseError(fmt::format("{}: missing header row", path.string()));
  if (t.rows.empty()) throw ParseError(fmt::format("{}: no data rows", path.string()));
  check_contiguous(t.rows, path);
  return t;
}

void write_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += fmt::format(".tmp{:08x}", rd());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out.flush()) throw Error(fmt::format("cannot write {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::string comment_block(const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  return out;
}

}  // namespace

TimeSeries load_csv(const fs::path& path, const std::string& date_column, const std::string& value_column,
                    std::string id) {
  auto t = read_table(path, {date_column, value_column}, false);
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& r : t.rows) v.push_back(r.values[0]);
  if (id.empty()) id = path.stem().string();
  return {std::move(id), t.rows.front().date, std::move(v)};
}

void write_csv(const fs::path& path, const TimeSeries& s, const std::vector<std::string>& comments) {
  std::string out = comment_block(comments) + "date,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) out += s.date_at(i).iso() + "," + format_value(s[i]) + "\n";
  write_atomically(path, out);
}

std::vector<TimeSeries> load_panel(const fs::path& path) {
  auto t = read_table(path, {}, true);
  if (t.header.size() < 2) throw ParseError(fmt::format("{}: panel needs a date column and a series", path.string()));
  std::vector<TimeSeries> out;
  for (std::size_t j = 1; j < t.header.size(); ++j) {
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(r.values[j - 1]);
    out.emplace_back(t.header[j], t.rows.front().date, std::move(v));
  }
  return out;
}

void write_panel(const fs::path& path, const std::vector<TimeSeries>& series, const std::vector<std::string>& comments) {
  if (series.empty()) throw LengthError("write_panel: no series");
  for (const auto& s : series)
    if (s.start() != series[0].start() || s.size() != series[0].size())
      throw AlignmentError(fmt::format("write_panel: {} covers {}..{}, expected {}..{}", s.id(), s.start().label(),
                                       s.end().label(), series[0].start().label(), series[0].end().label()));
  std::string out = comment_block(comments) + "date";
  for (const auto& s : series) out += "," + s.id();
  out += "\n";
  for (std::size_t i = 0; i < series[0].size(); ++i) {
    out += series[0].date_at(i).iso();
    for (const auto& s : series) out += "," + format_value(s[i]);
    out += "\n";
  }
  write_atomically(path, out);
}

std::vector<std::pair<std::string, std::string>> read_csv_comments(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    auto body = trim(line.substr(1));
    auto eq = body.find('=');
    if (eq != std::string::npos) out.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return out;
}

namespace {

class HttplibTransport final : public Transport {
public:
  HttpResponse get(const std::string& host, const std::string& path_and_query) override {
    httplib::SSLClient client(host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    auto res = client.Get(path_and_query);
    if (!res) throw TransportError(fmt::format("GET https://{} failed: {}", host, httplib::to_string(res.error())));
    return {res->status, res->body};
  }
};

const char* kFredHost = "api.stlouisfed.org";

}  // namespace

std::unique_ptr<Transport> make_https_transport() { return std::make_unique<HttplibTransport>(); }

FredClient::FredClient(std::shared_ptr<Transport> transport, fs::path cache_dir)
    : transport_(std::move(transport)), cache_dir_(std::move(cache_dir)) {}

fs::path FredClient::cache_path(const std::string& series_code, const Window& window) const {
  return cache_dir_ / fmt::format("{}_{}_{}.json", series_code, window.start.iso(), window.end.iso());
}

TimeSeries FredClient::fetch(const std::string& series_code, const std::string& api_key, const Window& window) {
  if (series_code.empty()) throw ConfigError("FRED series code is empty");
  if (window.end < window.start)
    throw RangeError(fmt::format("window {}..{} is reversed", window.start.label(), window.end.label()));

  const bool cached = !cache_dir_.empty();
  const fs::path cache_file = cached ? cache_path(series_code, window) : fs::path{};
  std::string body;
  if (cached && fs::exists(cache_file)) {
    std::ifstream in(cache_file, std::ios::binary);
    body.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    if (api_key.empty()) throw AuthError("FRED_API_KEY is not set and no cached response exists for " + series_code);
    if (!transport_) throw TransportError("no HTTP transport configured");
    const std::string query = fmt::format(
        "/fred/series/observations?series_id={}&api_key={}&file_type=json&frequency=m"
        "&observation_start={}-01&observation_end={}-01",
        httplib::detail::encode_query_param(series_code), httplib::detail::encode_query_param(api_key),
        window.start.iso(), window.end.iso());
    ++network_calls_;
    auto res = transport_->get(kFredHost, query);
    if (res.status != 200) {
      std::string message = res.body;
      try {
        auto j = json::parse(res.body);
        if (j.contains("error_message")) message = j["error_message"].get<std::string>();
      } catch (const json::exception&) {
      }
      const bool auth = res.status == 401 || res.status == 403 ||
                        (res.status == 400 && message.find("api_key") != std::string::npos);
      if (auth) throw AuthError(fmt::format("FRED rejected the API key (HTTP {}): {}", res.status, message));
      throw TransportError(fmt::format("FRED request for {} failed with HTTP {}: {}", series_code, res.status, message));
    }
    body = std::move(res.body);
  }

  TimeSeries s = parse_fred_observations(body, series_code);
  if (cached && !fs::exists(cache_file)) write_atomically(cache_file, body);
  return s;
}

TimeSeries parse_fred_observations(const std::string& body, const std::string& id) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("FRED response for {} is not valid JSON: {}", id, e.what()));
  }
  if (!j.contains("observations") || !j["observations"].is_array())
    throw ParseError(fmt::format("FRED response for {} has no observations array", id));
  std::vector<Row> rows;
  int k = 0;
  for (const auto& o : j["observations"]) {
    ++k;
    const auto date = MonthIndex::parse(o.at("date").get<std::string>());
    const auto value = o.at("value").get<std::string>();
    if (value == ".") throw GapError(fmt::format("FRED series {} has a missing observation at {}", id, date.label()));
    rows.push_back({date, {parse_number(value, "FRED:" + id, k)}, k});
  }
  if (rows.empty()) throw GapError(fmt::format("FRED series {} returned no observations", id));
  check_contiguous(rows, "FRED:" + id);
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.values[0]);
  return {id, rows.front().date, std::move(v)};
}

std::string fred_api_key_from_env() {
  const char* k = std::getenv("FRED_API_KEY");
  return k ? std::string(k) : std::string();
}

namespace {

const std::map<std::string, Source> kSources{{"csv", Source::csv}, {"fred", Source::fred}};
const std::map<std::string, Transform> kTransforms{{"none", Transform::none}, {"log", Transform::log}, {"yoy", Transform::yoy}};

template <class E>
std::string enum_name(const std::map<std::string, E>& table, E e) {
  for (const auto& [k, v] : table)
    if (v == e) return k;
  return "?";
}

template <class E>
E enum_value(const std::map<std::string, E>& table, const std::string& name, const char* what) {
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError(fmt::format("unknown {} '{}'", what, name));
  return it->second;
}

}  // namespace

void DatasetManifest::validate() const {
  if (entries.empty()) throw ConfigError("manifest has no series");
  if (window.end < window.start)
    throw ConfigError(fmt::format("manifest window {}..{} is reversed", window.start.label(), window.end.label()));
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    if (e.id.empty()) throw ConfigError("manifest entry without id");
    if (e.location.empty()) throw ConfigError(fmt::format("manifest entry {} has no location", e.id));
    if (std::find(ids.begin(), ids.end(), e.id) != ids.end())
      throw ConfigError(fmt::format("duplicate series id '{}' in manifest", e.id));
    ids.push_back(e.id);
  }
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open manifest {}", path.string()));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

DatasetManifest DatasetManifest::parse(const std::string& json_text, fs::path base_dir) {
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  try {
    auto j = json::parse(json_text);
    m.window.start = MonthIndex::parse(j.at("window").at("start").get<std::string>());
    m.window.end = MonthIndex::parse(j.at("window").at("end").get<std::string>());
    for (const auto& e : j.at("series")) {
      ManifestEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.source = enum_value(kSources, e.at("source").get<std::string>(), "source");
      entry.location = e.at("location").get<std::string>();
      entry.transform = enum_value(kTransforms, e.value("transform", std::string("none")), "transform");
      entry.role = e.value("role", std::string());
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("invalid manifest: {}", e.what()));
  }
  m.validate();
  return m;
}

std::string DatasetManifest::to_json() const {
  json j;
  j["window"] = {{"start", window.start.iso()}, {"end", window.end.iso()}};
  j["series"] = json::array();
  for (const auto& e : entries) {
    json o{{"id", e.id},
           {"source", enum_name(kSources, e.source)},
           {"location", e.location},
           {"transform", enum_name(kTransforms, e.transform)}};
    if (!e.role.empty()) o["role"] = e.role;
    j["series"].push_back(o);
  }
  return j.dump(2) + "\n";
}

std::vector<const ManifestEntry*> DatasetManifest::with_role(const std::string& role) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.role == role) out.push_back(&e);
  return out;
}

const TimeSeries& MaterializedSet::at(const std::string& id) const {
  for (const auto& s : series)
    if (s.id() == id) return s;
  throw ConfigError(fmt::format("series '{}' is not in the dataset", id));
}

std::string MaterializedSet::provenance_report() const {
  std::string out = "id,source,location,transform,raw_rows,rows,start,end\n";
  for (std::size_t i = 0; i < provenance.size(); ++i) {
    const auto& p = provenance[i];
    out += fmt::format("{},{},{},{},{},{},{},{}\n", p.id, p.source, p.location, p.transform, p.raw_rows, p.rows,
                       series[i].start().label(), series[i].end().label());
  }
  return out;
}

MaterializedSet materialize(const DatasetManifest& manifest, const MaterializeOptions& opts) {
  manifest.validate();
  std::vector<TimeSeries> transformed;
  MaterializedSet out;
  for (const auto& e : manifest.entries) {
    std::optional<TimeSeries> raw;
    if (e.source == Source::csv) {
      fs::path p = e.location;
      if (p.is_relative()) p = manifest.base_dir / p;
      raw = load_csv(p, "date", "value", e.id);
    } else {
      if (!opts.fred) throw ConfigError(fmt::format("series {} needs FRED access but no client was configured", e.id));
      Window w = manifest.window;
      if (e.transform == Transform::yoy) w.start = w.start.plus(-12);
      raw = opts.fred->fetch(e.location, opts.api_key, w).renamed(e.id);
    }
    ProvenanceRow row{e.id, enum_name(kSources, e.source), e.location, enum_name(kTransforms, e.transform), raw->size(), 0};
    switch (e.transform) {
      case Transform::none: transformed.push_back(*raw); break;
      case Transform::log: transformed.push_back(log_level(*raw)); break;
      case Transform::yoy: transformed.push_back(yoy_growth(*raw)); break;
    }
    out.provenance.push_back(row);
  }
  auto aligned = align(transformed);
  const MonthIndex from = std::max(aligned[0].start(), manifest.window.start);
  const MonthIndex to = std::min(aligned[0].end(), manifest.window.end);
  if (to < from)
    throw RangeError(fmt::format("no observations remain in window {}..{} after alignment ({}..{})",
                                 manifest.window.start.label(), manifest.window.end.label(), aligned[0].start().label(),
                                 aligned[0].end().label()));
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    out.series.push_back(aligned[i].slice(from, to));
    out.provenance[i].rows = out.series.back().size();
  }
  return out;
}

}  // namespace ucoint
