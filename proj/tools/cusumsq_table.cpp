// Regenerates the embedded CUSUM-of-squares bound table in src/stability.cpp.
// Under the null the recursive residuals are i.i.d. normal, so the two-sided
// statistic max_r |S_r - r/N| depends only on N = n - k.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 200000;
  const std::vector<int> grid{5, 6, 7, 8, 10, 12, 15, 20, 25, 30, 40, 50, 60, 80, 100, 120, 150, 200, 250, 300, 400, 500, 750, 1000};
  std::mt19937_64 rng(19690101);
  std::normal_distribution<double> z(0.0, 1.0);
  std::printf("// N, 1%%, 5%%, 10%%  (%d replications each)\n", reps);
  for (int N : grid) {
    std::vector<double> stat(static_cast<std::size_t>(reps));
    std::vector<double> w2(static_cast<std::size_t>(N));
    for (int r = 0; r < reps; ++r) {
      double total = 0.0;
      for (int j = 0; j < N; ++j) {
        double w = z(rng);
        w2[static_cast<std::size_t>(j)] = w * w;
        total += w * w;
      }
      double acc = 0.0, worst = 0.0;
      for (int j = 0; j < N; ++j) {
        acc += w2[static_cast<std::size_t>(j)];
        worst = std::max(worst, std::abs(acc / total - static_cast<double>(j + 1) / N));
      }
      stat[static_cast<std::size_t>(r)] = worst;
    }
    std::sort(stat.begin(), stat.end());
    auto q = [&](double p) { return stat[static_cast<std::size_t>(std::floor(p * (reps - 1)))]; };
    std::printf("    {%d, %.4f, %.4f, %.4f},\n", N, q(0.99), q(0.95), q(0.90));
  }
}
