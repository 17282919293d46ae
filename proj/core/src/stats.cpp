#include "obsolens/stats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "obsolens/csv.hpp"

namespace obsolens {

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

// Sum over tie groups of f(group size).
template <class F>
double tie_sum(std::span<const double> v, F f) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    acc += f(static_cast<double>(j - i));
    i = j;
  }
  return acc;
}

template <class Int>
Int parse_int(const std::string& field, std::size_t line) {
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kFormat,
                "series CSV line " + std::to_string(line) + ": bad integer '" + field + "'");
  }
  return value;
}

double parse_double(const std::string& field, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kFormat,
                "series CSV line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return value;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<double> FrequencySeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.pmw);
  return out;
}

void check_series(const FrequencySeries& series) {
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (!(series.points[i - 1].decade < series.points[i].decade)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "series '" + series.label + "' decades are not strictly increasing");
    }
  }
}

std::string_view to_string(TrendMethod method) {
  return method == TrendMethod::kExact ? "exact" : "normal_approx";
}

double per_million(std::uint64_t count, std::uint64_t token_total) {
  if (token_total == 0) throw Error(ErrorCode::kZeroDenominator, "token total is zero");
  return static_cast<double>(count) * 1e6 / static_cast<double>(token_total);
}

std::vector<PermutationCount> mahonian_row(int n) {
  if (n < 1 || n > kMaxExactN) {
    throw Error(ErrorCode::kInvalidArgument,
                "mahonian row needs 1 <= n <= " + std::to_string(kMaxExactN));
  }
  std::vector<PermutationCount> row{1};
  for (int m = 2; m <= n; ++m) {
    const std::size_t width = static_cast<std::size_t>(m) * (m - 1) / 2 + 1;
    // prefix[k] = row[0] + ... + row[k-1]
    std::vector<PermutationCount> prefix(row.size() + 1, 0);
    for (std::size_t k = 0; k < row.size(); ++k) prefix[k + 1] = prefix[k] + row[k];
    std::vector<PermutationCount> next(width, 0);
    for (std::size_t k = 0; k < width; ++k) {
      // T(m, k) = sum_{j=0..min(k, m-1)} T(m-1, k-j)
      const std::size_t hi = std::min(k, row.size() - 1);
      const std::size_t lo = k >= static_cast<std::size_t>(m - 1) ? k - (m - 1) : 0;
      if (lo <= hi) next[k] = prefix[hi + 1] - prefix[lo];
    }
    row = std::move(next);
  }
  return row;
}

double exact_p_value(int n, std::int64_t s_statistic) {
  if (n < 1 || n > kMaxExactN) {
    throw Error(ErrorCode::kInvalidArgument,
                "exact p-value needs 1 <= n <= " + std::to_string(kMaxExactN));
  }
  const std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const std::int64_t abs_s = s_statistic < 0 ? -s_statistic : s_statistic;
  if (abs_s > pairs) {
    throw Error(ErrorCode::kInvalidArgument,
                "|S| = " + std::to_string(abs_s) + " exceeds " + std::to_string(pairs));
  }
  const auto row = mahonian_row(n);
  PermutationCount tail = 0, total = 0;
  for (std::int64_t k = 0; k <= pairs; ++k) {
    total += row[k];
    // S = pairs - 2 * inversions
    const std::int64_t s = pairs - 2 * k;
    if ((s < 0 ? -s : s) >= abs_s) tail += row[k];
  }
  return static_cast<double>(static_cast<long double>(tail) / static_cast<long double>(total));
}

TrendResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "kendall_tau needs paired samples");
  }
  const auto n = static_cast<int>(x.size());
  if (n < 2) throw Error(ErrorCode::kTooFewPoints, "kendall_tau needs at least 2 points");

  std::int64_t s = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) s += sign(x[j] - x[i]) * sign(y[j] - y[i]);
  }
  const double n0 = static_cast<double>(n) * (n - 1) / 2.0;
  const double ties_x = tie_sum(x, [](double t) { return t * (t - 1) / 2.0; });
  const double ties_y = tie_sum(y, [](double t) { return t * (t - 1) / 2.0; });

  TrendResult r;
  r.n = n;
  r.s_statistic = s;
  const double denom = std::sqrt((n0 - ties_x) * (n0 - ties_y));
  if (denom == 0.0) {
    r.tau = 0.0;
    r.p_value = 1.0;
    r.method = TrendMethod::kNormalApprox;
    return r;
  }
  r.tau = static_cast<double>(s) / denom;

  if (ties_x == 0.0 && ties_y == 0.0 && n <= kMaxExactN) {
    r.method = TrendMethod::kExact;
    r.p_value = exact_p_value(n, s);
    return r;
  }

  const double nn = n;
  const auto v = [](double t) { return t * (t - 1) * (2 * t + 5); };
  const auto t2 = [](double t) { return t * (t - 1); };
  const auto t3 = [](double t) { return t * (t - 1) * (t - 2); };
  double var = (v(nn) - tie_sum(x, v) - tie_sum(y, v)) / 18.0;
  if (n > 2) var += tie_sum(x, t3) * tie_sum(y, t3) / (9.0 * nn * (nn - 1) * (nn - 2));
  var += tie_sum(x, t2) * tie_sum(y, t2) / (2.0 * nn * (nn - 1));
  r.method = TrendMethod::kNormalApprox;
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = static_cast<double>(s) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
  return r;
}

TrendResult kendall_trend(std::span<const double> values) {
  if (values.size() < 3) {
    throw Error(ErrorCode::kTooFewPoints,
                "trend needs at least 3 points, got " + std::to_string(values.size()));
  }
  std::vector<double> time(values.size());
  std::iota(time.begin(), time.end(), 0.0);
  return kendall_tau(time, values);
}

TrendResult kendall_trend(const FrequencySeries& series) {
  check_series(series);
  const auto values = series.values();
  return kendall_trend(std::span<const double>(values));
}

DeltaTable delta_table(const FrequencySeries& series) {
  if (series.points.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "delta table needs at least 2 points");
  }
  DeltaTable table;
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    const auto& a = series.points[i - 1];
    const auto& b = series.points[i];
    if (b.decade.start_year() != a.decade.start_year() + 10) {
      throw Error(ErrorCode::kNonConsecutiveDecades,
                  std::to_string(a.decade.start_year()) + " is followed by " +
                      std::to_string(b.decade.start_year()));
    }
    table.rows.push_back({a.decade, b.decade, b.pmw - a.pmw});
  }
  table.total = series.points.back().pmw - series.points.front().pmw;
  return table;
}

FrequencySeries reconstruct_series(std::string label, Decade first_decade, double baseline,
                                   std::span<const double> deltas) {
  FrequencySeries series{std::move(label), {}};
  double value = baseline;
  int year = first_decade.start_year();
  series.points.push_back({first_decade, 0, 0, value});
  for (double d : deltas) {
    value += d;
    year += 10;
    series.points.push_back({Decade(year), 0, 0, value});
  }
  return series;
}

double extrapolate(double pmw, double share) {
  if (!(share > 0.0)) throw Error(ErrorCode::kZeroShare, "genre share must be positive");
  if (share > 1.0) throw Error(ErrorCode::kInvalidArgument, "genre share exceeds 1");
  return pmw * 0.25 / share;
}

std::uint64_t SampleRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "empty range");
  // Reject the low partial block so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n >= population) return idx;
  SampleRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

PurposiveEstimate estimate_purposive(Decade decade, double total_pmw, int k, int n) {
  if (n <= 0 || k < 0 || k > n) {
    throw Error(ErrorCode::kInvalidArgument, "need n > 0 and 0 <= k <= n (k=" +
                                                 std::to_string(k) + ", n=" + std::to_string(n) +
                                                 ")");
  }
  if (!(total_pmw >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "total pmw is negative");
  PurposiveEstimate e;
  e.decade = decade;
  e.sample_size = n;
  e.k_purposive = k;
  e.total_pmw = total_pmw;
  e.purposive_pmw = total_pmw * k / n;
  e.non_purposive_pmw = total_pmw * (n - k) / n;
  return e;
}

FrequencySeries read_series_csv(std::istream& in, std::string label) {
  auto header = csv::read_row(in);
  if (!header || header->size() != 4 || trim((*header)[0]) != "decade" ||
      trim((*header)[1]) != "count" || trim((*header)[2]) != "token_total" ||
      trim((*header)[3]) != "pmw") {
    throw Error(ErrorCode::kFormat, "series CSV must start with decade,count,token_total,pmw");
  }
  FrequencySeries series{std::move(label), {}};
  std::size_t line = 1;
  while (auto row = csv::read_row(in)) {
    ++line;
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;
    if (row->size() != 4) {
      throw Error(ErrorCode::kFormat,
                  "series CSV line " + std::to_string(line) + ": expected 4 fields");
    }
    for (auto& f : *row) f = trim(f);
    FrequencyPoint p;
    p.decade = Decade(parse_int<int>((*row)[0], line));
    p.count = parse_int<std::uint64_t>((*row)[1], line);
    p.token_total = parse_int<std::uint64_t>((*row)[2], line);
    p.pmw = (*row)[3].empty() ? per_million(p.count, p.token_total)
                              : parse_double((*row)[3], line);
    series.points.push_back(p);
  }
  check_series(series);
  return series;
}

FrequencySeries read_series_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "series file '" + path + "' not found or unreadable");
  auto stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) {
    stem = stem.substr(slash + 1);
  }
  if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) {
    stem = stem.substr(0, dot);
  }
  return read_series_csv(in, stem);
}

void write_series_csv(std::ostream& out, const FrequencySeries& series) {
  csv::write_row(out, {"decade", "count", "token_total", "pmw"});
  for (const auto& p : series.points) {
    csv::write_row(out, {std::to_string(p.decade.start_year()), std::to_string(p.count),
                         std::to_string(p.token_total), csv::format_double(p.pmw)});
  }
}

}  // namespace obsolens
