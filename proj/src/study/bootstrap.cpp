#include "recourse/study/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recourse/error.hpp"

namespace recourse::study {

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidInput, "bounded_draw needs a positive bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidInput, "percentile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

PairedSummary paired_condition_summary(std::span<const std::pair<double, double>> pairs, std::size_t resamples,
                                       std::uint64_t seed, double confidence) {
  if (pairs.size() < 2) throw Error(ErrorCode::TooFewPairs, "need at least 2 paired participants");
  if (resamples == 0) throw Error(ErrorCode::InvalidInput, "resamples must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error(ErrorCode::InvalidInput, "confidence must be in (0,1)");

  std::vector<double> diffs;
  diffs.reserve(pairs.size());
  for (const auto& [fixed, dynamic] : pairs) diffs.push_back(dynamic - fixed);
  const auto n = diffs.size();

  PairedSummary out;
  out.n = n;
  out.resamples = resamples;
  double sum = 0.0;
  for (double d : diffs) sum += d;
  out.mean_difference = sum / static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += diffs[bounded_draw(rng, n)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - confidence;
  out.ci_low = percentile(means, alpha / 2.0);
  out.ci_high = percentile(means, 1.0 - alpha / 2.0);
  return out;
}

}  // namespace recourse::study
