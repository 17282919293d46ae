#include "obsolens/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "obsolens/error.hpp"

namespace obsolens {

using nlohmann::json;

namespace {

double stat(const Evidence& e, const std::string& key) {
  const auto it = e.stats.find(key);
  if (it == e.stats.end()) {
    throw Error(ErrorCode::kInvalidArgument, "evidence lacks statistic '" + key + "'");
  }
  return it->second;
}

void put_trend(Evidence& e, const std::string& prefix, const TrendResult& t) {
  e.stats[prefix + "tau"] = t.tau;
  e.stats[prefix + "p_value"] = t.p_value;
  e.stats[prefix + "n"] = t.n;
  e.stats[prefix + "s_statistic"] = static_cast<double>(t.s_statistic);
}

bool significant(double tau, double p, double alpha, int sign) {
  return (sign > 0 ? tau > 0 : tau < 0) && p < alpha;
}

NamedSeries named(std::string label, const std::vector<Decade>& decades,
                  const std::vector<double>& values) {
  NamedSeries s{std::move(label), {}};
  for (std::size_t i = 0; i < decades.size(); ++i) {
    s.points.emplace_back(decades[i].start_year(), values[i]);
  }
  return s;
}

bool negation_token(std::string_view norm) {
  return norm == "not" || norm == "n't" || (norm.size() > 3 && norm.ends_with("n't"));
}

// True if nothing but punctuation follows the match in its sentence.
bool is_final(const Sentence& sentence, const Match& match, const DiagnosticsConfig& config) {
  for (std::size_t i = match.end + 1; i < sentence.tokens.size(); ++i) {
    if (!config.is_punctuation(sentence.tokens[i].pos)) return false;
  }
  return true;
}

// Smallest two-sided p-value any outcome can produce at n points.
double min_attainable_p(int n) {
  if (n < 2) return 1.0;
  if (n > kMaxExactN) return 0.0;
  return exact_p_value(n, static_cast<std::int64_t>(n) * (n - 1) / 2);
}

std::string fmt_p(double p) { return fmt::format("{:.4g}", p); }

}  // namespace

std::string_view to_string(Symptom symptom) {
  switch (symptom) {
    case Symptom::kNegativeCorrelation: return "NegativeCorrelation";
    case Symptom::kDistributionalFragmentation: return "DistributionalFragmentation";
    case Symptom::kParadigmaticAtrophy: return "ParadigmaticAtrophy";
  }
  return "";
}

std::string_view to_string(CompetitorVerdict verdict) {
  switch (verdict) {
    case CompetitorVerdict::kMirrorDetected: return "mirror_detected";
    case CompetitorVerdict::kInsufficientGain: return "insufficient_gain";
    case CompetitorVerdict::kCompetitorAlsoDeclining: return "competitor_also_declining";
  }
  return "";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kObsolescentLikely: return "OBSOLESCENT_LIKELY";
    case Verdict::kDecliningOnly: return "DECLINING_ONLY";
    case Verdict::kNoEvidence: return "NO_EVIDENCE";
  }
  return "";
}

void DiagnosticsConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  if (negation_window < 1) throw Error(ErrorCode::kInvalidArgument, "negation_window must be >= 1");
  if (fragmentation_min_genres < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fragmentation_min_genres must be >= 1");
  }
  if (!(coverage_threshold >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "coverage_threshold must be >= 0");
  }
}

bool DiagnosticsConfig::is_punctuation(std::string_view pos) const {
  return punctuation_tags.find(normalize_form(pos)) != punctuation_tags.end();
}

// ---------------------------------------------------------------------------
// Symptom 1

SymptomFinding check_negative_correlation(const FrequencySeries& series,
                                          const DiagnosticsConfig& config) {
  config.validate();
  const auto trend = kendall_trend(series);
  SymptomFinding f;
  f.symptom = Symptom::kNegativeCorrelation;
  put_trend(f.evidence, "", trend);
  std::vector<Decade> decades;
  for (const auto& p : series.points) decades.push_back(p.decade);
  f.evidence.series.push_back(named(series.label.empty() ? "pmw" : series.label, decades,
                                    series.values()));
  f.evidence.notes.push_back(std::string("method=") + std::string(to_string(trend.method)));
  f.detected = redetect(f, config);
  f.narrative = fmt::format("Kendall tau = {:.7f} (p = {}, n = {}) between decade and frequency; {}",
                            trend.tau, fmt_p(trend.p_value), trend.n,
                            f.detected ? "significant negative correlation."
                                       : "no significant negative correlation.");
  return f;
}

// ---------------------------------------------------------------------------
// Symptom 2

SymptomFinding check_fragmentation(const std::map<std::string, FrequencySeries>& per_genre,
                                   const GenreShareTable& shares,
                                   const DiagnosticsConfig& config) {
  config.validate();
  SymptomFinding f;
  f.symptom = Symptom::kDistributionalFragmentation;
  int tested = 0;
  std::vector<std::string> rising, falling;

  for (const auto& [genre, series] : per_genre) {
    check_series(series);
    std::vector<Decade> decades;
    std::vector<double> values;
    int skipped = 0;
    for (const auto& p : series.points) {
      double share = 0.0;
      if (const auto row = shares.find(p.decade); row != shares.end()) {
        if (const auto it = row->second.find(genre); it != row->second.end()) share = it->second;
      }
      if (share <= 0.0) {
        ++skipped;
        f.evidence.notes.push_back(fmt::format("{}: decade {} skipped (genre share 0)", genre,
                                               p.decade.start_year()));
        continue;
      }
      decades.push_back(p.decade);
      values.push_back(extrapolate(p.pmw, share));
    }
    f.evidence.stats[genre + ".skipped"] = skipped;
    f.evidence.series.push_back(named("extrapolated:" + genre, decades, values));
    if (values.size() < 3) {
      f.evidence.notes.push_back(genre + ": fewer than 3 usable decades, not tested");
      continue;
    }
    ++tested;
    const auto trend = kendall_trend(std::span<const double>(values));
    put_trend(f.evidence, genre + ".", trend);
    if (significant(trend.tau, trend.p_value, config.alpha, +1)) rising.push_back(genre);
    if (significant(trend.tau, trend.p_value, config.alpha, -1)) falling.push_back(genre);
  }
  if (tested < config.fragmentation_min_genres) {
    throw Error(ErrorCode::kTooFewGenres,
                fmt::format("{} genre(s) with >= 3 points; need {}", tested,
                            config.fragmentation_min_genres));
  }
  f.evidence.stats["genres_tested"] = tested;
  f.detected = redetect(f, config);

  auto list = [](const std::vector<std::string>& v) {
    if (v.empty()) return std::string("none");
    std::string s;
    for (const auto& g : v) s += (s.empty() ? "" : ", ") + g;
    return s;
  };
  f.narrative = fmt::format(
      "Genre frequencies rescaled to equal 25% shares. Significant rise: {}; significant "
      "fall: {}. {} Opposing significant trends are required; a visual reading of the "
      "extrapolated curves may disagree at the margin.",
      list(rising), list(falling),
      f.detected ? "The construction is concentrating in fewer genres."
                 : "No increasing restriction to particular genres.");
  return f;
}

// ---------------------------------------------------------------------------
// Symptom 3

Position classify_position(const CorpusIndex& index, const Match& match,
                           const DiagnosticsConfig& config) {
  if (match.start == 0) return Position::kInitial;
  const auto& tokens = index.sentence(match.doc, match.sentence).tokens;
  for (std::uint32_t i = 0; i < match.start; ++i) {
    if (!config.is_punctuation(tokens[i].pos)) return Position::kNonInitial;
  }
  return Position::kInitial;
}

bool is_negated(const CorpusIndex& index, const Match& match, const DiagnosticsConfig& config) {
  const auto& tokens = index.sentence(match.doc, match.sentence).tokens;
  const std::size_t last =
      std::min(tokens.size(), static_cast<std::size_t>(match.end) + 1 + config.negation_window);
  for (std::size_t i = match.end + 1; i < last; ++i) {
    if (negation_token(tokens[i].norm)) return true;
  }
  return false;
}

SymptomFinding check_atrophy(const CorpusIndex& index, const MatchSet& matches,
                             const DiagnosticsConfig& config) {
  config.validate();
  struct Tally {
    std::uint64_t total = 0, initial = 0, negated = 0, final_ = 0, medial = 0;
  };
  std::map<Decade, Tally> by_decade;
  for (const auto& m : matches) {
    auto& t = by_decade[m.decade];
    ++t.total;
    if (classify_position(index, m, config) == Position::kInitial) {
      ++t.initial;
    } else if (is_final(index.sentence(m.doc, m.sentence), m, config)) {
      ++t.final_;
    } else {
      ++t.medial;
    }
    if (is_negated(index, m, config)) ++t.negated;
  }
  if (by_decade.size() < 3) {
    throw Error(ErrorCode::kTooFewPoints,
                fmt::format("atrophy check needs matches in >= 3 decades, got {}",
                            by_decade.size()));
  }

  std::vector<Decade> decades;
  std::vector<double> initial_share, negated_pmw, negated_share, overall_pmw;
  std::uint64_t medial = 0;
  for (const auto& [decade, t] : by_decade) {
    const auto tokens = token_totals(index, decade);
    decades.push_back(decade);
    initial_share.push_back(static_cast<double>(t.initial) / static_cast<double>(t.total));
    negated_share.push_back(static_cast<double>(t.negated) / static_cast<double>(t.total));
    negated_pmw.push_back(per_million(t.negated, tokens));
    overall_pmw.push_back(per_million(t.total, tokens));
    medial += t.medial;
  }

  SymptomFinding f;
  f.symptom = Symptom::kParadigmaticAtrophy;
  const auto position = kendall_trend(std::span<const double>(initial_share));
  const auto neg_pmw = kendall_trend(std::span<const double>(negated_pmw));
  const auto neg_share = kendall_trend(std::span<const double>(negated_share));
  const auto overall = kendall_trend(std::span<const double>(overall_pmw));
  put_trend(f.evidence, "position.", position);
  put_trend(f.evidence, "negated_pmw.", neg_pmw);
  put_trend(f.evidence, "negated_share.", neg_share);
  put_trend(f.evidence, "overall.", overall);
  f.evidence.stats["medial_matches"] = static_cast<double>(medial);
  f.evidence.series.push_back(named("initial_share", decades, initial_share));
  f.evidence.series.push_back(named("negated_pmw", decades, negated_pmw));
  f.evidence.series.push_back(named("negated_share", decades, negated_share));
  f.evidence.series.push_back(named("overall_pmw", decades, overall_pmw));
  f.evidence.notes.push_back(
      fmt::format("{} medial match(es) counted as non-initial", medial));
  f.detected = redetect(f, config);

  const bool pos_hit = position.p_value < config.alpha;
  const bool neg_hit = f.detected && !pos_hit;
  f.narrative = fmt::format(
      "Initial-position share: tau = {:.4f} (p = {}). Negated forms: pmw tau = {:.4f} "
      "(p = {}), share of all uses tau = {:.4f} (p = {}). {}",
      position.tau, fmt_p(position.p_value), neg_pmw.tau, fmt_p(neg_pmw.p_value), neg_share.tau,
      fmt_p(neg_share.p_value),
      pos_hit   ? "The position alternation is shifting toward one variant."
      : neg_hit ? "Negated forms are disappearing faster than the construction overall."
                : "No sign of a variant being lost.");
  return f;
}

bool redetect(const SymptomFinding& finding, const DiagnosticsConfig& config) {
  const auto& e = finding.evidence;
  // No statistics: the symptom could not be tested on this data.
  if (e.stats.empty()) return false;
  switch (finding.symptom) {
    case Symptom::kNegativeCorrelation:
      return significant(stat(e, "tau"), stat(e, "p_value"), config.alpha, -1);
    case Symptom::kDistributionalFragmentation: {
      bool up = false, down = false;
      for (const auto& [key, value] : e.stats) {
        if (!key.ends_with(".tau")) continue;
        const auto genre = key.substr(0, key.size() - 4);
        const double p = stat(e, genre + ".p_value");
        up = up || significant(value, p, config.alpha, +1);
        down = down || significant(value, p, config.alpha, -1);
      }
      return up && down;
    }
    case Symptom::kParadigmaticAtrophy: {
      const bool position = stat(e, "position.p_value") < config.alpha;
      const bool negated =
          significant(stat(e, "negated_pmw.tau"), stat(e, "negated_pmw.p_value"), config.alpha,
                      -1) &&
          significant(stat(e, "negated_share.tau"), stat(e, "negated_share.p_value"),
                      config.alpha, -1);
      return position || negated;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Competition

CompetitorFinding competitor_mirror(const FrequencySeries& target,
                                    const FrequencySeries& competitor,
                                    const DiagnosticsConfig& config) {
  config.validate();
  check_series(target);
  check_series(competitor);
  if (target.points.size() < 2 || competitor.points.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "competitor analysis needs >= 2 points per series");
  }
  if (target.points.front().decade != competitor.points.front().decade ||
      target.points.back().decade != competitor.points.back().decade) {
    throw Error(ErrorCode::kRangeMismatch, "target and competitor cover different decade ranges");
  }
  // Target restricted to the competitor's decades.
  std::vector<double> target_vals, comp_vals;
  for (const auto& cp : competitor.points) {
    const auto it = std::find_if(target.points.begin(), target.points.end(),
                                 [&](const FrequencyPoint& p) { return p.decade == cp.decade; });
    if (it == target.points.end()) {
      throw Error(ErrorCode::kRangeMismatch,
                  fmt::format("competitor decade {} missing from target",
                              cp.decade.start_year()));
    }
    target_vals.push_back(it->pmw);
    comp_vals.push_back(cp.pmw);
  }
  const double target_total = target.points.back().pmw - target.points.front().pmw;
  if (!(target_total < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target series does not decline over its range");
  }

  CompetitorFinding f;
  f.competitor_label = competitor.label;
  f.total_gain = competitor.points.back().pmw - competitor.points.front().pmw;
  f.coverage_ratio = f.total_gain / std::fabs(target_total);
  f.trend = comp_vals.size() >= 3 ? kendall_trend(std::span<const double>(comp_vals))
                                  : kendall_tau(std::vector<double>{0.0, 1.0}, comp_vals);
  f.underpowered = min_attainable_p(static_cast<int>(comp_vals.size())) >= config.alpha;

  std::vector<double> target_deltas, comp_deltas;
  for (std::size_t i = 1; i < comp_vals.size(); ++i) {
    target_deltas.push_back(target_vals[i] - target_vals[i - 1]);
    comp_deltas.push_back(comp_vals[i] - comp_vals[i - 1]);
  }
  f.delta_mirror_tau =
      target_deltas.size() >= 2 ? kendall_tau(target_deltas, comp_deltas).tau : 0.0;
  f.verdict = derive_competitor_verdict(f, config);
  return f;
}

CompetitorVerdict derive_competitor_verdict(const CompetitorFinding& f,
                                            const DiagnosticsConfig& config) {
  if (f.total_gain <= 0.0) return CompetitorVerdict::kCompetitorAlsoDeclining;
  const bool rising = f.trend.tau > 0.0 &&
                      (f.trend.p_value < config.alpha || (f.underpowered && f.trend.tau == 1.0));
  if (rising && f.coverage_ratio >= config.coverage_threshold) {
    return CompetitorVerdict::kMirrorDetected;
  }
  return CompetitorVerdict::kInsufficientGain;
}

// ---------------------------------------------------------------------------
// Report

Verdict derive_verdict(const std::vector<SymptomFinding>& findings) {
  bool s1 = false;
  int others = 0;
  for (const auto& f : findings) {
    if (!f.detected) continue;
    if (f.symptom == Symptom::kNegativeCorrelation) {
      s1 = true;
    } else {
      ++others;
    }
  }
  if (s1 && others > 0) return Verdict::kObsolescentLikely;
  if (s1) return Verdict::kDecliningOnly;
  return Verdict::kNoEvidence;
}

SymptomReport compile_report(std::string target_label, std::vector<SymptomFinding> findings,
                             std::vector<CompetitorFinding> competitors, ReportMetadata metadata,
                             DiagnosticsConfig config) {
  SymptomReport r;
  for (auto symptom : {Symptom::kNegativeCorrelation, Symptom::kDistributionalFragmentation,
                       Symptom::kParadigmaticAtrophy}) {
    auto it = std::find_if(findings.begin(), findings.end(),
                           [&](const SymptomFinding& f) { return f.symptom == symptom; });
    if (it == findings.end()) {
      throw Error(ErrorCode::kMissingFinding,
                  "no finding for " + std::string(to_string(symptom)));
    }
    r.findings.push_back(std::move(*it));
  }
  r.target_label = std::move(target_label);
  r.competitors = std::move(competitors);
  r.metadata = std::move(metadata);
  r.config = std::move(config);
  r.verdict = derive_verdict(r.findings);
  return r;
}

namespace {

template <class Enum, std::size_t N>
Enum enum_from(std::string_view name, const Enum (&values)[N]) {
  for (auto v : values) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::kFormat, "unknown enum value '" + std::string(name) + "'");
}

json trend_json(const TrendResult& t) {
  return {{"tau", t.tau},
          {"p_value", t.p_value},
          {"n", t.n},
          {"s_statistic", t.s_statistic},
          {"method", std::string(to_string(t.method))}};
}

TrendResult trend_from(const json& j) {
  TrendResult t;
  t.tau = j.at("tau").get<double>();
  t.p_value = j.at("p_value").get<double>();
  t.n = j.at("n").get<int>();
  t.s_statistic = j.at("s_statistic").get<std::int64_t>();
  t.method = j.at("method").get<std::string>() == "exact" ? TrendMethod::kExact
                                                          : TrendMethod::kNormalApprox;
  return t;
}

}  // namespace

namespace {

json finding_json(const SymptomFinding& f) {
  json series = json::array();
  for (const auto& s : f.evidence.series) {
    json pts = json::array();
    for (const auto& [d, v] : s.points) pts.push_back({d, v});
    series.push_back({{"label", s.label}, {"points", pts}});
  }
  return {{"symptom", std::string(to_string(f.symptom))},
          {"detected", f.detected},
          {"evidence",
           {{"stats", f.evidence.stats}, {"series", series}, {"notes", f.evidence.notes}}},
          {"narrative", f.narrative}};
}

json competitor_json(const CompetitorFinding& c) {
  return {{"label", c.competitor_label},
          {"trend", trend_json(c.trend)},
          {"total_gain", c.total_gain},
          {"delta_mirror_tau", c.delta_mirror_tau},
          {"coverage_ratio", c.coverage_ratio},
          {"underpowered", c.underpowered},
          {"verdict", std::string(to_string(c.verdict))}};
}

}  // namespace

std::string finding_to_json(const SymptomFinding& finding) {
  return finding_json(finding).dump(2) + "\n";
}

std::string competitors_to_json(const std::vector<CompetitorFinding>& competitors) {
  json arr = json::array();
  for (const auto& c : competitors) arr.push_back(competitor_json(c));
  return arr.dump(2) + "\n";
}

std::string report_to_json(const SymptomReport& r) {
  json findings = json::array();
  for (const auto& f : r.findings) findings.push_back(finding_json(f));
  json competitors = json::array();
  for (const auto& c : r.competitors) competitors.push_back(competitor_json(c));
  json punct = json::array();
  for (const auto& p : r.config.punctuation_tags) punct.push_back(p);
  json doc = {
      {"version", kReportVersion},
      {"target", r.target_label},
      {"config",
       {{"alpha", r.config.alpha},
        {"negation_window", r.config.negation_window},
        {"fragmentation_min_genres", r.config.fragmentation_min_genres},
        {"position_rule", "sentence_initial"},
        {"coverage_threshold", r.config.coverage_threshold},
        {"punctuation_tags", punct}}},
      {"findings", findings},
      {"competitors", competitors},
      {"verdict", std::string(to_string(r.verdict))},
      {"metadata",
       {{"corpus_hash", r.metadata.corpus_hash},
        {"seed", r.metadata.seed},
        {"timestamp", r.metadata.timestamp ? json(*r.metadata.timestamp) : json(nullptr)}}},
  };
  return doc.dump(2) + "\n";
}

SymptomReport report_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("report JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kReportVersion) {
      throw Error(ErrorCode::kFormat, "unsupported report version");
    }
    SymptomReport r;
    r.target_label = doc.at("target").get<std::string>();
    const auto& cfg = doc.at("config");
    r.config.alpha = cfg.at("alpha").get<double>();
    r.config.negation_window = cfg.at("negation_window").get<int>();
    r.config.fragmentation_min_genres = cfg.at("fragmentation_min_genres").get<int>();
    r.config.coverage_threshold = cfg.at("coverage_threshold").get<double>();
    r.config.punctuation_tags.clear();
    for (const auto& p : cfg.at("punctuation_tags")) {
      r.config.punctuation_tags.insert(p.get<std::string>());
    }
    static constexpr Symptom kSymptoms[] = {Symptom::kNegativeCorrelation,
                                            Symptom::kDistributionalFragmentation,
                                            Symptom::kParadigmaticAtrophy};
    for (const auto& jf : doc.at("findings")) {
      SymptomFinding f;
      f.symptom = enum_from(jf.at("symptom").get<std::string>(), kSymptoms);
      f.detected = jf.at("detected").get<bool>();
      f.narrative = jf.at("narrative").get<std::string>();
      const auto& ev = jf.at("evidence");
      f.evidence.stats = ev.at("stats").get<std::map<std::string, double>>();
      f.evidence.notes = ev.at("notes").get<std::vector<std::string>>();
      for (const auto& js : ev.at("series")) {
        NamedSeries s{js.at("label").get<std::string>(), {}};
        for (const auto& pt : js.at("points")) {
          s.points.emplace_back(pt.at(0).get<int>(), pt.at(1).get<double>());
        }
        f.evidence.series.push_back(std::move(s));
      }
      r.findings.push_back(std::move(f));
    }
    static constexpr CompetitorVerdict kVerdicts[] = {
        CompetitorVerdict::kMirrorDetected, CompetitorVerdict::kInsufficientGain,
        CompetitorVerdict::kCompetitorAlsoDeclining};
    for (const auto& jc : doc.at("competitors")) {
      CompetitorFinding c;
      c.competitor_label = jc.at("label").get<std::string>();
      c.trend = trend_from(jc.at("trend"));
      c.total_gain = jc.at("total_gain").get<double>();
      c.delta_mirror_tau = jc.at("delta_mirror_tau").get<double>();
      c.coverage_ratio = jc.at("coverage_ratio").get<double>();
      c.underpowered = jc.at("underpowered").get<bool>();
      c.verdict = enum_from(jc.at("verdict").get<std::string>(), kVerdicts);
      r.competitors.push_back(std::move(c));
    }
    static constexpr Verdict kReportVerdicts[] = {Verdict::kObsolescentLikely,
                                                  Verdict::kDecliningOnly, Verdict::kNoEvidence};
    r.verdict = enum_from(doc.at("verdict").get<std::string>(), kReportVerdicts);
    const auto& meta = doc.at("metadata");
    r.metadata.corpus_hash = meta.at("corpus_hash").get<std::string>();
    r.metadata.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("timestamp").is_null()) {
      r.metadata.timestamp = meta.at("timestamp").get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("report JSON: ") + e.what());
  }
}

std::string report_to_text(const SymptomReport& r) {
  std::ostringstream out;
  out << "Obsolescence report: " << r.target_label << "\n";
  out << "Verdict: " << to_string(r.verdict) << "\n\n";
  for (const auto& f : r.findings) {
    out << "  [" << (f.detected ? "x" : " ") << "] " << to_string(f.symptom) << "\n";
    out << "      " << f.narrative << "\n";
  }
  if (!r.competitors.empty()) {
    out << "\nCompetitors:\n";
    for (const auto& c : r.competitors) {
      out << fmt::format("  {:<28} tau={:+.4f} p={:<10} gain={:+.2f} coverage={:.3f}  {}\n",
                         c.competitor_label, c.trend.tau, fmt_p(c.trend.p_value), c.total_gain,
                         c.coverage_ratio, to_string(c.verdict));
    }
  }
  out << fmt::format("\nalpha={} corpus={} seed={}\n", r.config.alpha,
                     r.metadata.corpus_hash.empty() ? "-" : r.metadata.corpus_hash,
                     r.metadata.seed);
  return out.str();
}

}  // namespace obsolens
