#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ucoint/series.hpp"

namespace ucoint {

// CSV with a header row; dates YYYY-MM (YYYY-MM-DD accepted). Lines starting
// with '#' are comments. Rows may arrive in any order; duplicate dates and
// missing months are errors.
TimeSeries load_csv(const std::filesystem::path& path, const std::string& date_column = "date",
                    const std::string& value_column = "value", std::string id = {});
void write_csv(const std::filesystem::path& path, const TimeSeries& s, const std::vector<std::string>& comments = {});

// Wide format: date, then one column per series. Series must share a window.
std::vector<TimeSeries> load_panel(const std::filesystem::path& path);
void write_panel(const std::filesystem::path& path, const std::vector<TimeSeries>& series,
                 const std::vector<std::string>& comments = {});

// Leading "# key=value" comment lines of a CSV file.
std::vector<std::pair<std::string, std::string>> read_csv_comments(const std::filesystem::path& path);

struct HttpResponse {
  int status = 0;
  std::string body;
};

class Transport {
public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& host, const std::string& path_and_query) = 0;
};

// HTTPS via cpp-httplib.
std::unique_ptr<Transport> make_https_transport();

struct Window {
  MonthIndex start;
  MonthIndex end;
};

class FredClient {
public:
  // cache_dir may be empty to disable caching.
  FredClient(std::shared_ptr<Transport> transport, std::filesystem::path cache_dir);

  TimeSeries fetch(const std::string& series_code, const std::string& api_key, const Window& window);
  std::filesystem::path cache_path(const std::string& series_code, const Window& window) const;
  int network_calls() const { return network_calls_; }

private:
  std::shared_ptr<Transport> transport_;
  std::filesystem::path cache_dir_;
  int network_calls_ = 0;
};

// Decodes a FRED observations payload into a monthly series.
TimeSeries parse_fred_observations(const std::string& body, const std::string& id);

// FRED_API_KEY, or an empty string.
std::string fred_api_key_from_env();

enum class Source { csv, fred };
enum class Transform { none, log, yoy };

struct ManifestEntry {
  std::string id;
  Source source = Source::csv;
  std::string location;  // CSV path (relative to the manifest) or FRED series code
  Transform transform = Transform::none;
  std::string role;      // "index", "cpi", "ip" or empty
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  Window window;
  std::filesystem::path base_dir;

  void validate() const;
  static DatasetManifest load(const std::filesystem::path& path);
  static DatasetManifest parse(const std::string& json_text, std::filesystem::path base_dir);
  std::string to_json() const;
  std::vector<const ManifestEntry*> with_role(const std::string& role) const;
};

struct ProvenanceRow {
  std::string id;
  std::string source;
  std::string location;
  std::string transform;
  std::size_t raw_rows = 0;
  std::size_t rows = 0;
};

struct MaterializedSet {
  std::vector<TimeSeries> series;  // aligned and windowed, manifest order
  std::vector<ProvenanceRow> provenance;

  const TimeSeries& at(const std::string& id) const;
  std::string provenance_report() const;
};

struct MaterializeOptions {
  std::shared_ptr<FredClient> fred;  // required only for FRED entries
  std::string api_key;
};

MaterializedSet materialize(const DatasetManifest& manifest, const MaterializeOptions& opts = {});

}  // namespace ucoint
