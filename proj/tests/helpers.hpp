#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ucoint/random.hpp"
#include "ucoint/series.hpp"

namespace testing {

inline Eigen::VectorXd normal_vector(ucoint::Rng& rng, int n, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

inline Eigen::VectorXd random_walk(ucoint::Rng& rng, int n) {
  Eigen::VectorXd e = normal_vector(rng, n);
  for (int i = 1; i < n; ++i) e(i) += e(i - 1);
  return e;
}

inline ucoint::TimeSeries series(const std::string& id, const Eigen::VectorXd& v,
                                 ucoint::MonthIndex start = {2002, 7}) {
  return ucoint::from_vector(id, start, v);
}

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("ucoint_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p);

}  // namespace testing

#include <fstream>
#include <iterator>

inline std::string testing::slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
