#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obsolens/corpus.hpp"
#include "obsolens/error.hpp"

namespace obsolens {

struct FrequencyPoint {
  Decade decade;
  std::uint64_t count = 0;
  std::uint64_t token_total = 0;
  double pmw = 0.0;

  bool operator==(const FrequencyPoint&) const = default;
};

struct FrequencySeries {
  std::string label;
  std::vector<FrequencyPoint> points;

  std::vector<double> values() const;
  std::size_t size() const noexcept { return points.size(); }
};

// Throws Error(kInvalidArgument) on duplicate or unordered decades.
void check_series(const FrequencySeries& series);

enum class TrendMethod { kExact, kNormalApprox };
std::string_view to_string(TrendMethod method);

struct TrendResult {
  double tau = 0.0;
  double p_value = 1.0;
  int n = 0;
  std::int64_t s_statistic = 0;
  TrendMethod method = TrendMethod::kExact;
};

struct DeltaRow {
  Decade from;
  Decade to;
  double delta = 0.0;
};

struct DeltaTable {
  std::vector<DeltaRow> rows;
  double total = 0.0;
};

struct PurposiveEstimate {
  Decade decade;
  int sample_size = 0;
  int k_purposive = 0;
  double total_pmw = 0.0;
  double purposive_pmw = 0.0;
  double non_purposive_pmw = 0.0;
};

// Largest n for which exact (Mahonian) p-values are used.
inline constexpr int kMaxExactN = 30;

double per_million(std::uint64_t count, std::uint64_t token_total);

// Kendall tau-b between two paired samples. Exact two-sided p from the
// inversion distribution when neither sample has ties and n <= kMaxExactN,
// otherwise the tie-corrected normal approximation without continuity
// correction. A sample that is entirely tied gives tau 0, p 1.
TrendResult kendall_tau(std::span<const double> x, std::span<const double> y);

// Trend of values against their time order. Throws kTooFewPoints for n < 3.
TrendResult kendall_trend(std::span<const double> values);
TrendResult kendall_trend(const FrequencySeries& series);

// Number of permutations of n elements with k inversions, k = 0..n(n-1)/2.
using PermutationCount = unsigned __int128;
std::vector<PermutationCount> mahonian_row(int n);

// P(|S| >= |s|) for S = concordant - discordant pairs under a uniformly
// random permutation of n distinct values.
double exact_p_value(int n, std::int64_t s_statistic);

DeltaTable delta_table(const FrequencySeries& series);

// Inverse of delta_table: baseline at first_decade, then cumulative deltas on
// consecutive decades. Counts are zero; token_total is zero.
FrequencySeries reconstruct_series(std::string label, Decade first_decade, double baseline,
                                   std::span<const double> deltas);

// pmw rescaled as if the genre made up a quarter of the corpus.
double extrapolate(double pmw, double share);

// std::mt19937_64 with a portable bounded draw (the standard distributions are
// implementation-defined, so they are not used for anything that must replay).
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// n distinct indices from [0, population), uniform without replacement,
// returned in ascending order. All indices when n >= population.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed);

template <class T>
struct SampledItem {
  std::string sample_id;
  T item;
};

// Items keep their population order; ids are "<prefix>0001", "<prefix>0002", ...
template <class T>
std::vector<SampledItem<T>> draw_sample(std::span<const T> population, std::size_t n,
                                        std::uint64_t seed, std::string_view id_prefix = "t") {
  if (population.empty()) throw Error(ErrorCode::kEmptyMatchSet, "nothing to sample from");
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample size must be at least 1");
  std::vector<SampledItem<T>> out;
  const auto picked = sample_indices(population.size(), n, seed);
  out.reserve(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    std::string id(id_prefix);
    auto num = std::to_string(i + 1);
    if (num.size() < 4) id.append(4 - num.size(), '0');
    id += num;
    out.push_back({std::move(id), population[picked[i]]});
  }
  return out;
}

PurposiveEstimate estimate_purposive(Decade decade, double total_pmw, int k, int n);

// decade,count,token_total,pmw
FrequencySeries read_series_csv(std::istream& in, std::string label);
FrequencySeries read_series_csv_file(const std::string& path);
void write_series_csv(std::ostream& out, const FrequencySeries& series);

}  // namespace obsolens
