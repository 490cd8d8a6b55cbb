#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace recourse::study {

struct PairedSummary {
  double mean_difference = 0.0;  // mean of (dynamic - fixed)
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  std::size_t resamples = 0;
};

inline constexpr std::size_t kDefaultResamples = 10'000;

// Percentile bootstrap over participants. pairs[i] = (fixed, dynamic).
// Deterministic given seed. Throws Error(TooFewPairs) below two pairs and
// Error(InvalidInput) for resamples == 0 or a confidence outside (0,1).
PairedSummary paired_condition_summary(std::span<const std::pair<double, double>> pairs,
                                       std::size_t resamples = kDefaultResamples, std::uint64_t seed = 0,
                                       double confidence = 0.95);

// Uniform integer in [0, bound) by rejection sampling, so results do not
// depend on the standard library's distribution implementation.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound);

// Linear interpolation between closest ranks (R type 7) on sorted data.
double percentile(std::span<const double> sorted, double q);

}  // namespace recourse::study
