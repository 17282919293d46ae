#include "doctest.h"
#include "json.hpp"
#include "obsolens/diagnostics.hpp"
#include "obsolens/error.hpp"
#include "support/oracles.hpp"

using namespace obsolens;

namespace {

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kFormat;
}

FrequencySeries reconstructed(const std::vector<double>& deltas, double baseline = 20.0) {
  return reconstruct_series("x", Decade(1900), baseline, deltas);
}

FrequencySeries series_of(const std::vector<double>& values, const std::vector<int>& decades) {
  FrequencySeries s{"s", {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.points.push_back({Decade(decades[i]), 0, 0, values[i]});
  }
  return s;
}

std::string tokens_line(const std::string& words) {
  std::string out;
  std::istringstream in(words);
  for (std::string w; in >> w;) {
    std::string tag = w == "," || w == "." || w == "\"" ? "y" : w == "not" ? "xx" : "nn1";
    if (w == "that") tag = "cst";
    out += w + "\t" + tag + "\n";
  }
  return out + "\n";
}

Match only_match(const CorpusIndex& idx, const std::string& pattern) {
  const auto m = match_pattern(idx, parse_pattern(pattern));
  REQUIRE(m.size() == 1);
  return m[0];
}

CorpusIndex one_sentence(const std::string& words) {
  return build_index(parse_vertical("#doc id=e year=1990 genre=fic\n" + tokens_line(words)));
}

SymptomFinding bare(Symptom s, bool detected) {
  SymptomFinding f;
  f.symptom = s;
  f.detected = detected;
  return f;
}

// Ten decades, ten "in order that" per decade, three sentence-initial; the
// first three decades have four negated uses each, later decades none.
CorpusIndex vanishing_negation() {
  std::string text;
  for (int d = 0; d < 10; ++d) {
    text += "#doc id=v" + std::to_string(d) + " year=" + std::to_string(1900 + 10 * d) +
            " genre=fic\n";
    for (int i = 0; i < 10; ++i) {
      const bool initial = i < 3, negated = d < 3 && i >= 6;
      std::string s = initial ? "in order that he might eat" : "he worked in order that he might eat";
      if (negated) s += " not";
      s += " .";
      text += tokens_line(s);
    }
    for (int pad = 0; pad < (d < 3 ? 6 : 10); ++pad) text += tokens_line("rain");
  }
  return build_index(parse_vertical(text));
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("negative correlation on the published series") {
  const DiagnosticsConfig config;
  const auto iot = check_negative_correlation(reconstructed(oracle::kInOrderThatDeltas), config);
  CHECK(iot.detected);
  CHECK(iot.symptom == Symptom::kNegativeCorrelation);
  CHECK(std::abs(iot.evidence.stats.at("tau") - (-0.9636364)) < 1e-6);
  CHECK(std::abs(iot.evidence.stats.at("p_value") - 5.511e-07) < 1e-9);

  const auto st = check_negative_correlation(reconstructed(oracle::kSoThatDeltas, 60), config);
  CHECK(st.detected);
  CHECK(std::abs(st.evidence.stats.at("tau") - (-0.6)) < 1e-9);

  const auto up = check_negative_correlation(series_of({1, 2, 3, 4}, {1900, 1910, 1920, 1930}), config);
  CHECK_FALSE(up.detected);
  CHECK(up.evidence.stats.at("tau") == doctest::Approx(1.0));

  CHECK(error_of([&] {
          check_negative_correlation(series_of({1, 2}, {1900, 1910}), config);
        }) == ErrorCode::kTooFewPoints);
}

TEST_CASE("detection is invariant under shifts and positive scaling") {
  const DiagnosticsConfig config;
  for (const auto* deltas : {&oracle::kInOrderThatDeltas, &oracle::kSoThatDeltas,
                             &oracle::kInOrderForToDeltas}) {
    const auto base = check_negative_correlation(reconstructed(*deltas), config).detected;
    for (double c : {-7.5, 0.0, 3.0, 1000.0}) {
      for (double k : {0.001, 1.0, 42.0}) {
        auto s = reconstructed(*deltas);
        for (auto& p : s.points) p.pmw = k * (p.pmw + c);
        CHECK(check_negative_correlation(s, config).detected == base);
      }
    }
  }
}

TEST_CASE("fragmentation on the fixture corpus") {
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  const auto m = match_pattern(idx, parse_pattern("in order that"));
  std::map<std::string, FrequencySeries> per_genre;
  for (const auto& g : idx.genres()) {
    per_genre[g] = frequency_series(m, idx, g, Denominator::kDecade, g);
  }
  const auto f = check_fragmentation(per_genre, genre_share_table(idx), DiagnosticsConfig{});
  CHECK(f.detected);
  CHECK(f.evidence.stats.at("nf.tau") > 0);
  CHECK(f.evidence.stats.at("nf.p_value") < 0.05);
  CHECK(f.evidence.stats.at("mag.tau") < 0);
  CHECK(f.evidence.stats.at("mag.p_value") < 0.05);
  CHECK(f.evidence.stats.at("news.tau") < 0);
  CHECK(f.evidence.stats.at("news.p_value") < 0.05);
  CHECK(f.evidence.stats.at("fic.p_value") >= 0.05);
  CHECK(f.evidence.stats.at("genres_tested") == 4);

  // Extrapolated value = count per decade token / share * 0.25 = count per
  // genre token * 0.25.
  const auto shares = genre_share_table(idx);
  for (const auto& s : f.evidence.series) {
    const auto genre = s.label.substr(s.label.find(':') + 1);
    for (const auto& [decade, value] : s.points) {
      const auto gt = token_totals(idx, Decade(decade), genre);
      std::size_t c = 0;
      for (const auto& x : m) c += x.decade == Decade(decade) && x.genre == genre;
      CHECK(value == doctest::Approx(0.25 * 1e6 * c / gt).epsilon(1e-9));
    }
  }
}

TEST_CASE("identical declining series in every genre is not fragmentation") {
  std::map<std::string, FrequencySeries> per_genre;
  GenreShareTable shares;
  const std::vector<int> decades{1900, 1910, 1920, 1930, 1940, 1950};
  for (const std::string g : {"fic", "mag", "news", "nf"}) {
    per_genre[g] = series_of({6, 5, 4, 3, 2, 1}, decades);
    for (int d : decades) shares[Decade(d)][g] = 0.25;
  }
  const auto f = check_fragmentation(per_genre, shares, DiagnosticsConfig{});
  CHECK_FALSE(f.detected);
}

TEST_CASE("a zero-share decade is skipped and noted") {
  std::map<std::string, FrequencySeries> per_genre;
  GenreShareTable shares;
  const std::vector<int> decades{1900, 1910, 1920, 1930, 1940, 1950};
  per_genre["up"] = series_of({1, 2, 3, 4, 5, 6}, decades);
  per_genre["down"] = series_of({6, 5, 4, 3, 2, 1}, decades);
  per_genre["late"] = series_of({0, 2, 3, 4, 5, 6}, decades);
  for (int d : decades) {
    shares[Decade(d)] = {{"up", 0.4}, {"down", 0.4}, {"late", d == 1900 ? 0.0 : 0.2}};
  }
  const auto f = check_fragmentation(per_genre, shares, DiagnosticsConfig{});
  CHECK(f.detected);
  CHECK(f.evidence.stats.at("late.skipped") == 1);
  CHECK(f.evidence.stats.at("late.n") == 5);
  bool noted = false;
  for (const auto& n : f.evidence.notes) noted = noted || n.find("late: decade 1900") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("too few testable genres") {
  std::map<std::string, FrequencySeries> per_genre;
  GenreShareTable shares;
  const std::vector<int> decades{1900, 1910, 1920};
  for (const std::string g : {"a", "b"}) {
    per_genre[g] = series_of({1, 2, 3}, decades);
    for (int d : decades) shares[Decade(d)][g] = 0.5;
  }
  CHECK(error_of([&] { check_fragmentation(per_genre, shares, DiagnosticsConfig{}); }) ==
        ErrorCode::kTooFewGenres);
}

TEST_CASE("sentence position") {
  const DiagnosticsConfig config;
  const auto pre = one_sentence("In order that this might happen quickly , they must govern");
  CHECK(classify_position(pre, only_match(pre, "in order that"), config) == Position::kInitial);

  const auto post = one_sentence("he was compelled to find work in order that he might eat");
  CHECK(classify_position(post, only_match(post, "in order that"), config) ==
        Position::kNonInitial);

  const auto quoted = one_sentence("\" In order that we may live");
  CHECK(classify_position(quoted, only_match(quoted, "in order that"), config) ==
        Position::kInitial);

  DiagnosticsConfig no_punct;
  no_punct.punctuation_tags.clear();
  CHECK(classify_position(quoted, only_match(quoted, "in order that"), no_punct) ==
        Position::kNonInitial);
  CHECK(classify_position(pre, only_match(pre, "in order that"), no_punct) == Position::kInitial);
}

TEST_CASE("negation window") {
  const DiagnosticsConfig config;
  const auto near = one_sentence("in order that he might not eat");
  CHECK(is_negated(near, only_match(near, "in order that"), config));
  const auto contracted =
      build_index(parse_vertical("#doc id=c year=1990 genre=fic\nin\tii\norder\tnn1\nthat\tcst\n"
                                 "they\tpphs2\ndo\tvd0\nn't\txx\nstarve\tvvi\n"));
  CHECK(is_negated(contracted, only_match(contracted, "in order that"), config));
  const auto fused = one_sentence("in order that he won't starve");
  CHECK(is_negated(fused, only_match(fused, "in order that"), config));
  const auto far = one_sentence("in order that a b c d e f not");
  CHECK_FALSE(is_negated(far, only_match(far, "in order that"), config));
  DiagnosticsConfig wide;
  wide.negation_window = 7;
  CHECK(is_negated(far, only_match(far, "in order that"), wide));
  const auto before = one_sentence("not in order that he eats");
  CHECK_FALSE(is_negated(before, only_match(before, "in order that"), config));
}

TEST_CASE("atrophy: fixture with stable position and negation mix") {
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  const auto f = check_atrophy(idx, match_pattern(idx, parse_pattern("in order that")),
                               DiagnosticsConfig{});
  CHECK_FALSE(f.detected);
  CHECK(f.evidence.stats.at("position.p_value") >= 0.05);
  CHECK(f.evidence.stats.contains("medial_matches"));
}

TEST_CASE("atrophy: negated forms vanish after the third decade") {
  const auto idx = vanishing_negation();
  const auto m = match_pattern(idx, parse_pattern("in order that"));
  REQUIRE(m.size() == 100);
  const auto f = check_atrophy(idx, m, DiagnosticsConfig{});
  CHECK(f.detected);
  CHECK(f.evidence.stats.at("position.p_value") == 1.0);
  CHECK(f.evidence.stats.at("negated_pmw.tau") < 0);
  CHECK(f.evidence.stats.at("negated_pmw.p_value") < 0.05);
  CHECK(f.evidence.stats.at("negated_share.p_value") < 0.05);
  CHECK(f.evidence.stats.at("overall.p_value") >= 0.05);
}

TEST_CASE("atrophy needs several decades") {
  const auto idx = one_sentence("in order that he might eat");
  CHECK(error_of([&] {
          check_atrophy(idx, match_pattern(idx, parse_pattern("in order that")), DiagnosticsConfig{});
        }) == ErrorCode::kTooFewPoints);
}

TEST_CASE("competitor verdicts for the published series") {
  const DiagnosticsConfig config;
  const auto target = read_series_csv_file(oracle::fixture("in_order_that.csv"));

  const auto for_to =
      competitor_mirror(target, read_series_csv_file(oracle::fixture("in_order_for_to.csv")), config);
  CHECK(for_to.verdict == CompetitorVerdict::kInsufficientGain);
  CHECK(for_to.total_gain == doctest::Approx(1.01).epsilon(1e-9));
  CHECK(for_to.coverage_ratio == doctest::Approx(1.01 / 18.06).epsilon(1e-9));

  const auto so_that =
      competitor_mirror(target, read_series_csv_file(oracle::fixture("so_that_purposive.csv")), config);
  CHECK(so_that.verdict == CompetitorVerdict::kCompetitorAlsoDeclining);
  CHECK(so_that.total_gain == doctest::Approx(-24.02).epsilon(1e-9));

  const auto so =
      competitor_mirror(target, read_series_csv_file(oracle::fixture("so_purposive.csv")), config);
  CHECK(so.verdict == CompetitorVerdict::kMirrorDetected);
  CHECK(so.total_gain == doctest::Approx(60.01).epsilon(1e-9));
  CHECK(so.coverage_ratio == doctest::Approx(60.01 / 18.06).epsilon(1e-9));
  CHECK(so.underpowered);
  CHECK(so.trend.tau == 1.0);
}

TEST_CASE("competitor range checks") {
  const DiagnosticsConfig config;
  const auto target = series_of({5, 4, 2}, {1900, 1910, 1930});
  CHECK(error_of([&] {
          competitor_mirror(target, series_of({1, 2}, {1910, 1930}), config);
        }) == ErrorCode::kRangeMismatch);
  CHECK(error_of([&] {
          competitor_mirror(target, series_of({1, 2, 3}, {1900, 1920, 1930}), config);
        }) == ErrorCode::kRangeMismatch);
  CHECK(error_of([&] {
          competitor_mirror(series_of({1, 2, 3}, {1900, 1910, 1930}),
                            series_of({1, 2}, {1900, 1930}), config);
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("exactly one competitor verdict for any finding") {
  const DiagnosticsConfig config;
  for (double gain : {-5.0, 0.0, 0.1, 9.0}) {
    for (double ratio : {0.0, 0.49, 0.5, 3.0}) {
      for (double tau : {-1.0, 0.0, 0.4, 1.0}) {
        for (double p : {0.001, 0.2}) {
          for (bool under : {false, true}) {
            CompetitorFinding f;
            f.total_gain = gain;
            f.coverage_ratio = ratio;
            f.trend.tau = tau;
            f.trend.p_value = p;
            f.underpowered = under;
            const auto v = derive_competitor_verdict(f, config);
            if (gain <= 0) {
              CHECK(v == CompetitorVerdict::kCompetitorAlsoDeclining);
            } else if (tau > 0 && (p < 0.05 || (under && tau == 1.0)) && ratio >= 0.5) {
              CHECK(v == CompetitorVerdict::kMirrorDetected);
            } else {
              CHECK(v == CompetitorVerdict::kInsufficientGain);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("report verdicts") {
  using S = Symptom;
  const auto verdict = [](bool a, bool b, bool c) {
    return compile_report("t", {bare(S::kNegativeCorrelation, a),
                                bare(S::kDistributionalFragmentation, b),
                                bare(S::kParadigmaticAtrophy, c)},
                          {}, {})
        .verdict;
  };
  CHECK(verdict(true, true, false) == Verdict::kObsolescentLikely);
  CHECK(verdict(true, false, true) == Verdict::kObsolescentLikely);
  CHECK(verdict(true, true, true) == Verdict::kObsolescentLikely);
  CHECK(verdict(true, false, false) == Verdict::kDecliningOnly);
  CHECK(verdict(false, false, false) == Verdict::kNoEvidence);
  CHECK(verdict(false, true, true) == Verdict::kNoEvidence);
  CHECK(error_of([] {
          compile_report("t", {bare(S::kNegativeCorrelation, true)}, {}, {});
        }) == ErrorCode::kMissingFinding);
}

TEST_CASE("report JSON round trip; verdict recomputed from stored evidence") {
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  const auto m = match_pattern(idx, parse_pattern("in order that"));
  const DiagnosticsConfig config;
  std::map<std::string, FrequencySeries> per_genre;
  for (const auto& g : idx.genres()) {
    per_genre[g] = frequency_series(m, idx, g, Denominator::kDecade, g);
  }
  const auto series = frequency_series(m, idx, std::nullopt, Denominator::kSlice, "in order that");
  const auto report = compile_report(
      "in order that",
      {check_negative_correlation(series, config),
       check_fragmentation(per_genre, genre_share_table(idx), config), check_atrophy(idx, m, config)},
      {competitor_mirror(read_series_csv_file(oracle::fixture("in_order_that.csv")),
                         read_series_csv_file(oracle::fixture("so_purposive.csv")), config)},
      {idx.content_hash(), 20210419, std::nullopt}, config);
  CHECK(report.verdict == Verdict::kObsolescentLikely);

  const auto text = report_to_json(report);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("version") == kReportVersion);
  CHECK(j.at("verdict") == "OBSOLESCENT_LIKELY");
  CHECK(j.at("metadata").at("timestamp").is_null());
  CHECK(j.at("findings").size() == 3);

  const auto back = report_from_json(text);
  CHECK(report_to_json(back) == text);
  CHECK(back.verdict == report.verdict);
  std::vector<SymptomFinding> recomputed = back.findings;
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    CHECK(redetect(recomputed[i], back.config) == report.findings[i].detected);
    CHECK(recomputed[i].evidence == report.findings[i].evidence);
    recomputed[i].detected = redetect(recomputed[i], back.config);
  }
  CHECK(derive_verdict(recomputed) == report.verdict);
  REQUIRE(back.competitors.size() == 1);
  CHECK(back.competitors[0].verdict == CompetitorVerdict::kMirrorDetected);

  const auto plain = report_to_text(report);
  CHECK(plain.find("OBSOLESCENT_LIKELY") != std::string::npos);
  CHECK(plain.find("mirror_detected") != std::string::npos);
}

TEST_CASE("a stricter alpha changes the stored verdict on re-detection") {
  SymptomFinding f = check_negative_correlation(reconstructed(oracle::kSoThatDeltas), {});
  CHECK(f.detected);
  DiagnosticsConfig strict;
  strict.alpha = 0.005;
  CHECK_FALSE(redetect(f, strict));
  SymptomFinding untested = bare(Symptom::kParadigmaticAtrophy, false);
  CHECK_FALSE(redetect(untested, strict));
}

TEST_CASE("config validation") {
  DiagnosticsConfig c;
  c.alpha = 0;
  CHECK(error_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
  c.alpha = 0.05;
  c.negation_window = 0;
  CHECK(error_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
}

}
