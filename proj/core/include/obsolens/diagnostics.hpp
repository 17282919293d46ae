#pragma once

// Obsolescence symptom battery:
//   1. negative correlation between time and frequency (necessary condition)
//   2. distributional fragmentation across genres
//   3. paradigmatic atrophy (position alternation, negated forms)
// plus the competitor "mirror" check and the combined verdict.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "obsolens/index.hpp"
#include "obsolens/query.hpp"
#include "obsolens/stats.hpp"

namespace obsolens {

enum class Symptom { kNegativeCorrelation, kDistributionalFragmentation, kParadigmaticAtrophy };
std::string_view to_string(Symptom symptom);

struct NamedSeries {
  std::string label;
  std::vector<std::pair<int, double>> points;  // (decade start, value)

  bool operator==(const NamedSeries&) const = default;
};

struct Evidence {
  std::map<std::string, double> stats;
  std::vector<NamedSeries> series;
  std::vector<std::string> notes;

  bool operator==(const Evidence&) const = default;
};

struct SymptomFinding {
  Symptom symptom = Symptom::kNegativeCorrelation;
  bool detected = false;
  Evidence evidence;
  std::string narrative;
};

enum class PositionRule { kSentenceInitial };

struct DiagnosticsConfig {
  double alpha = 0.05;
  int negation_window = 6;
  int fragmentation_min_genres = 3;
  PositionRule position_rule = PositionRule::kSentenceInitial;
  double coverage_threshold = 0.5;
  std::set<std::string, std::less<>> punctuation_tags = {"y",  "punc", "pun", ".",  ",",
                                                         ":",  ";",    "!",   "?",  "\"",
                                                         "``", "''",   "(",   ")",  "-lrb-",
                                                         "-rrb-"};

  // Throws Error(kInvalidArgument) when a field is out of range.
  void validate() const;
  bool is_punctuation(std::string_view pos) const;
};

SymptomFinding check_negative_correlation(const FrequencySeries& series,
                                          const DiagnosticsConfig& config);

// per_genre values are each genre's matches per million tokens of the whole
// decade; they are rescaled with extrapolate() using that decade's share.
SymptomFinding check_fragmentation(const std::map<std::string, FrequencySeries>& per_genre,
                                   const GenreShareTable& shares,
                                   const DiagnosticsConfig& config);

enum class Position { kInitial, kNonInitial };

Position classify_position(const CorpusIndex& index, const Match& match,
                           const DiagnosticsConfig& config);

// "not" / "n't" within negation_window tokens after the match, same sentence.
bool is_negated(const CorpusIndex& index, const Match& match, const DiagnosticsConfig& config);

SymptomFinding check_atrophy(const CorpusIndex& index, const MatchSet& matches,
                             const DiagnosticsConfig& config);

// Recomputes the detected flag from evidence.stats and the thresholds. Empty
// stats (symptom not testable) mean not detected.
bool redetect(const SymptomFinding& finding, const DiagnosticsConfig& config);

enum class CompetitorVerdict { kMirrorDetected, kInsufficientGain, kCompetitorAlsoDeclining };
std::string_view to_string(CompetitorVerdict verdict);

struct CompetitorFinding {
  std::string competitor_label;
  TrendResult trend;
  double total_gain = 0.0;
  double delta_mirror_tau = 0.0;
  double coverage_ratio = 0.0;
  // No outcome of the trend test at this n can reach alpha; a perfectly
  // monotone rise then counts as a significant increase.
  bool underpowered = false;
  CompetitorVerdict verdict = CompetitorVerdict::kInsufficientGain;
};

// The competitor may be sampled on a subset of the target's decades (e.g.
// three spot decades); both must start and end on the same decade.
CompetitorFinding competitor_mirror(const FrequencySeries& target,
                                    const FrequencySeries& competitor,
                                    const DiagnosticsConfig& config);

CompetitorVerdict derive_competitor_verdict(const CompetitorFinding& finding,
                                            const DiagnosticsConfig& config);

enum class Verdict { kObsolescentLikely, kDecliningOnly, kNoEvidence };
std::string_view to_string(Verdict verdict);

struct ReportMetadata {
  std::string corpus_hash;
  std::uint64_t seed = 0;
  std::optional<std::string> timestamp;
};

struct SymptomReport {
  std::string target_label;
  std::vector<SymptomFinding> findings;  // one per Symptom, in enum order
  std::vector<CompetitorFinding> competitors;
  Verdict verdict = Verdict::kNoEvidence;
  DiagnosticsConfig config;
  ReportMetadata metadata;
};

inline constexpr int kReportVersion = 1;

Verdict derive_verdict(const std::vector<SymptomFinding>& findings);

SymptomReport compile_report(std::string target_label, std::vector<SymptomFinding> findings,
                             std::vector<CompetitorFinding> competitors, ReportMetadata metadata,
                             DiagnosticsConfig config = {});

std::string report_to_json(const SymptomReport& report);
std::string finding_to_json(const SymptomFinding& finding);
std::string competitors_to_json(const std::vector<CompetitorFinding>& competitors);
SymptomReport report_from_json(std::string_view json);
std::string report_to_text(const SymptomReport& report);

}  // namespace obsolens
