#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "config.hpp"
#include "json.hpp"
#include "obsolens/csv.hpp"
#include "obsolens/diagnostics.hpp"
#include "obsolens/error.hpp"
#include "obsolens/index.hpp"
#include "obsolens/query.hpp"
#include "obsolens/service.hpp"
#include "obsolens/session.hpp"
#include "obsolens/stats.hpp"

namespace obsolens::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class Format { kTable, kCsv, kJson };

struct Common {
  std::optional<std::string> config_path;
  std::string corpus;
  std::string index_cache;
  std::vector<std::string> patterns;
  std::string format = "table";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> width;
};

struct Options {
  Common common;
  std::string series_path;
  std::string plot_out;
  std::string series_out;
  std::string genre;
  std::string label;
  std::string target_path;
  std::vector<std::string> competitor_paths;
  std::vector<std::string> competitor_patterns;
  std::string session;
  int port = 8765;
  std::string static_dir;
  std::string timestamp;
  std::optional<std::size_t> sample_n;
  std::vector<int> decades;
  std::size_t limit = 0;
};

Format parse_format(const std::string& f) {
  if (f == "table" || f == "text") return Format::kTable;
  if (f == "csv") return Format::kCsv;
  if (f == "json") return Format::kJson;
  throw Error(ErrorCode::kInvalidArgument, "unknown format '" + f + "' (table, csv, json)");
}

// Shared state of one invocation.
class Context {
 public:
  Context(const Options& opts, std::ostream& out, std::ostream& err)
      : opts_(opts), out_(out), err_(err), settings_(load_settings(opts.common.config_path)) {
    if (opts.common.seed) settings_.seed = *opts.common.seed;
    if (opts.common.width) settings_.kwic_width = *opts.common.width;
    if (!opts.common.patterns.empty()) settings_.patterns = opts.common.patterns;
    format_ = parse_format(opts.common.format);
  }

  const Options& opts() const { return opts_; }
  const Settings& settings() const { return settings_; }
  const DiagnosticsConfig& diag() const { return settings_.diagnostics; }
  Format format() const { return format_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  const CorpusIndex& index() {
    if (index_) return *index_;
    const auto& path = opts_.common.corpus;
    if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "--corpus is required");
    if (!fs::exists(path)) throw Error(ErrorCode::kIo, "corpus '" + path + "' not found");
    const auto& cache = opts_.common.index_cache;
    if (!cache.empty() && fs::exists(cache)) {
      std::ifstream in(path, std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      if (auto cached = load_index_cache(cache, content_hash(buf.str()))) {
        index_ = std::move(*cached);
        return *index_;
      }
    }
    index_ = index_corpus_file(path);
    if (!cache.empty()) save_index_cache(*index_, cache);
    return *index_;
  }

  std::vector<QueryPattern> patterns() const {
    if (settings_.patterns.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "at least one --pattern is required");
    }
    std::vector<QueryPattern> out;
    for (const auto& p : settings_.patterns) out.push_back(parse_pattern(p));
    return out;
  }

  std::string pattern_label() const {
    std::string label;
    for (const auto& p : settings_.patterns) label += (label.empty() ? "" : " + ") + p;
    return label;
  }

  MatchSet matches() {
    const auto pats = patterns();
    return match_patterns(index(), pats);
  }

  // --series file, or the summed per-decade frequency of the patterns.
  FrequencySeries target_series(const std::string& path) {
    if (!path.empty()) return read_series_csv_file(path);
    const auto m = matches();
    std::optional<std::string_view> genre;
    if (!opts_.genre.empty()) genre = opts_.genre;
    auto label = opts_.label.empty() ? pattern_label() : opts_.label;
    return frequency_series(m, index(), genre, Denominator::kSlice, label);
  }

 private:
  const Options& opts_;
  std::ostream& out_;
  std::ostream& err_;
  Settings settings_;
  Format format_ = Format::kTable;
  std::optional<CorpusIndex> index_;
};

std::string num(double v) { return csv::format_double(v); }

void write_csv(std::ostream& out, std::initializer_list<std::string> fields) {
  csv::write_row(out, std::vector<std::string>(fields));
}

void write_plot(const std::string& path, const std::vector<NamedSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write plot data to '" + path + "'");
  write_csv(out, {"decade", "series", "value"});
  for (const auto& s : series) {
    for (const auto& [decade, value] : s.points) {
      write_csv(out, {std::to_string(decade), s.label, num(value)});
    }
  }
}

NamedSeries to_named(const FrequencySeries& s) {
  NamedSeries n{s.label, {}};
  for (const auto& p : s.points) n.points.emplace_back(p.decade.start_year(), p.pmw);
  return n;
}

std::string direction(const TrendResult& t, double alpha) {
  if (t.p_value >= alpha) return "no significant trend";
  return t.tau < 0 ? "significant decrease" : "significant increase";
}

json trend_json(const TrendResult& t) {
  return {{"tau", t.tau},
          {"p_value", t.p_value},
          {"n", t.n},
          {"s_statistic", t.s_statistic},
          {"method", std::string(to_string(t.method))}};
}

// ---------------------------------------------------------------------------

void cmd_ingest(Context& ctx) {
  const auto& idx = ctx.index();
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"decade", "genre", "tokens"});
      for (const auto& [key, n] : idx.slice_totals()) {
        write_csv(out, {std::to_string(key.first.start_year()), key.second, std::to_string(n)});
      }
      return;
    case Format::kJson: {
      json slices = json::array(), decades = json::array();
      for (const auto& [key, n] : idx.slice_totals()) {
        slices.push_back({{"decade", key.first.start_year()}, {"genre", key.second}, {"tokens", n}});
      }
      for (const auto& d : idx.decades()) decades.push_back(d.start_year());
      json j = {{"corpus_hash", idx.content_hash()},
                {"documents", idx.documents().size()},
                {"tokens", idx.total_tokens()},
                {"vocabulary", idx.vocabulary_size()},
                {"decades", decades},
                {"genres", idx.genres()},
                {"slices", slices}};
      out << j.dump(2) << "\n";
      return;
    }
    case Format::kTable: {
      out << fmt::format("hash        {}\n", idx.content_hash());
      out << fmt::format("documents   {}\n", idx.documents().size());
      out << fmt::format("tokens      {}\n", idx.total_tokens());
      out << fmt::format("vocabulary  {}\n\n", idx.vocabulary_size());
      out << fmt::format("{:<8}", "decade");
      for (const auto& g : idx.genres()) out << fmt::format("{:>10}", g);
      out << fmt::format("{:>10}\n", "total");
      for (const auto& d : idx.decades()) {
        out << fmt::format("{:<8}", d.start_year());
        for (const auto& g : idx.genres()) {
          const auto it = idx.slice_totals().find({d, g});
          out << fmt::format("{:>10}", it == idx.slice_totals().end() ? 0 : it->second);
        }
        out << fmt::format("{:>10}\n", token_totals(idx, d));
      }
      return;
    }
  }
}

void cmd_query(Context& ctx) {
  const auto& idx = ctx.index();
  auto m = ctx.matches();
  if (!ctx.opts().genre.empty()) {
    std::erase_if(m, [&](const Match& x) { return x.genre != ctx.opts().genre; });
  }
  const auto width = ctx.settings().kwic_width;
  if (!ctx.opts().series_out.empty()) {
    std::ofstream s(ctx.opts().series_out, std::ios::binary);
    if (!s) throw Error(ErrorCode::kIo, "cannot write '" + ctx.opts().series_out + "'");
    std::optional<std::string_view> genre;
    if (!ctx.opts().genre.empty()) genre = ctx.opts().genre;
    write_series_csv(s, frequency_series(m, idx, genre, Denominator::kSlice, ctx.pattern_label()));
  }
  const std::size_t limit = ctx.opts().limit == 0 ? m.size() : std::min(m.size(), ctx.opts().limit);
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv: {
      MatchSet shown(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(limit));
      write_matches_csv(out, idx, shown, width);
      return;
    }
    case Format::kJson: {
      json arr = json::array();
      for (std::size_t i = 0; i < limit; ++i) {
        const auto line = kwic(idx, m[i], width);
        arr.push_back({{"doc_id", m[i].doc_id},
                       {"year", idx.document(m[i].doc).year},
                       {"decade", m[i].decade.start_year()},
                       {"genre", m[i].genre},
                       {"sentence_no", m[i].sentence},
                       {"start", m[i].start},
                       {"end", m[i].end},
                       {"left", line.left},
                       {"hit", line.hit},
                       {"right", line.right}});
      }
      out << json{{"count", m.size()}, {"matches", arr}}.dump(2) << "\n";
      return;
    }
    case Format::kTable:
      for (std::size_t i = 0; i < limit; ++i) {
        const auto line = kwic(idx, m[i], width);
        out << fmt::format("{:<10} {} {:<5} {:>40} [{}] {}\n", m[i].doc_id,
                           m[i].decade.start_year(), m[i].genre, line.left, line.hit, line.right);
      }
      out << fmt::format("{} match(es)\n", m.size());
      return;
  }
}

void cmd_trend(Context& ctx) {
  const auto series = ctx.target_series(ctx.opts().series_path);
  const auto t = kendall_trend(series);
  if (!ctx.opts().plot_out.empty()) write_plot(ctx.opts().plot_out, {to_named(series)});
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"series", "n", "s_statistic", "tau", "p_value", "method"});
      write_csv(out, {series.label, std::to_string(t.n), std::to_string(t.s_statistic), num(t.tau),
                      num(t.p_value), std::string(to_string(t.method))});
      return;
    case Format::kJson: {
      auto j = trend_json(t);
      j["series"] = series.label;
      out << j.dump(2) << "\n";
      return;
    }
    case Format::kTable:
      out << fmt::format("series   {}\n", series.label);
      out << fmt::format("n        {}\n", t.n);
      out << fmt::format("S        {}\n", t.s_statistic);
      out << fmt::format("tau      {:.7f}\n", t.tau);
      out << fmt::format("p-value  {:.4g}\n", t.p_value);
      out << fmt::format("method   {}\n", to_string(t.method));
      out << fmt::format("result   {} (alpha {})\n", direction(t, ctx.diag().alpha),
                         num(ctx.diag().alpha));
      return;
  }
}

void cmd_deltas(Context& ctx) {
  const auto series = ctx.target_series(ctx.opts().series_path);
  const auto table = delta_table(series);
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"from", "to", "delta"});
      for (const auto& r : table.rows) {
        write_csv(out, {std::to_string(r.from.start_year()), std::to_string(r.to.start_year()),
                        num(r.delta)});
      }
      write_csv(out, {"total", "", num(table.total)});
      return;
    case Format::kJson: {
      json rows = json::array();
      for (const auto& r : table.rows) {
        rows.push_back(
            {{"from", r.from.start_year()}, {"to", r.to.start_year()}, {"delta", r.delta}});
      }
      out << json{{"series", series.label}, {"rows", rows}, {"total", table.total}}.dump(2)
          << "\n";
      return;
    }
    case Format::kTable:
      out << fmt::format("{}\n", series.label);
      for (const auto& r : table.rows) {
        out << fmt::format("{}-{}  {:>+9.2f}\n", r.from.start_year(), r.to.start_year(), r.delta);
      }
      out << fmt::format("{:<9}  {:>+9.2f}\n", "In total", table.total);
      return;
  }
}

void cmd_genres(Context& ctx) {
  const auto& idx = ctx.index();
  const auto table = genre_share_table(idx);
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"decade", "genre", "tokens", "share"});
      for (const auto& [d, row] : table) {
        for (const auto& [g, share] : row) {
          write_csv(out, {std::to_string(d.start_year()), g, std::to_string(token_totals(idx, d, g)),
                          num(share)});
        }
      }
      return;
    case Format::kJson: {
      json arr = json::array();
      for (const auto& [d, row] : table) {
        json shares = json::object();
        for (const auto& [g, share] : row) shares[g] = share;
        arr.push_back({{"decade", d.start_year()}, {"tokens", token_totals(idx, d)}, {"shares", shares}});
      }
      out << arr.dump(2) << "\n";
      return;
    }
    case Format::kTable:
      out << fmt::format("{:<8}", "decade");
      for (const auto& g : idx.genres()) out << fmt::format("{:>8}", g);
      out << "\n";
      for (const auto& [d, row] : table) {
        out << fmt::format("{:<8}", d.start_year());
        for (const auto& g : idx.genres()) {
          const auto it = row.find(g);
          out << fmt::format("{:>8.2f}", it == row.end() ? 0.0 : it->second);
        }
        out << "\n";
      }
      return;
  }
}

SymptomFinding run_fragmentation(Context& ctx) {
  const auto& idx = ctx.index();
  const auto m = ctx.matches();
  std::map<std::string, FrequencySeries> per_genre;
  for (const auto& g : idx.genres()) {
    per_genre[g] = frequency_series(m, idx, g, Denominator::kDecade, g);
  }
  return check_fragmentation(per_genre, genre_share_table(idx), ctx.diag());
}

void print_finding(Context& ctx, const SymptomFinding& f) {
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"symptom", "statistic", "value"});
      write_csv(out, {std::string(to_string(f.symptom)), "detected", f.detected ? "1" : "0"});
      for (const auto& [k, v] : f.evidence.stats) {
        write_csv(out, {std::string(to_string(f.symptom)), k, num(v)});
      }
      return;
    case Format::kJson:
      out << finding_to_json(f);
      return;
    case Format::kTable:
      out << fmt::format("{}: {}\n", to_string(f.symptom), f.detected ? "DETECTED" : "not detected");
      for (const auto& [k, v] : f.evidence.stats) out << fmt::format("  {:<28} {:.6g}\n", k, v);
      for (const auto& n : f.evidence.notes) out << "  note: " << n << "\n";
      out << f.narrative << "\n";
      return;
  }
}

void cmd_fragment(Context& ctx) {
  const auto f = run_fragmentation(ctx);
  if (!ctx.opts().plot_out.empty()) write_plot(ctx.opts().plot_out, f.evidence.series);
  print_finding(ctx, f);
}

void cmd_atrophy(Context& ctx) {
  const auto m = ctx.matches();
  print_finding(ctx, check_atrophy(ctx.index(), m, ctx.diag()));
}

std::vector<FrequencySeries> competitor_series(Context& ctx) {
  std::vector<FrequencySeries> out;
  for (const auto& p : ctx.opts().competitor_paths) out.push_back(read_series_csv_file(p));
  for (const auto& p : ctx.opts().competitor_patterns) {
    const auto m = match_pattern(ctx.index(), parse_pattern(p));
    out.push_back(frequency_series(m, ctx.index(), std::nullopt, Denominator::kSlice, p));
  }
  return out;
}

void cmd_compete(Context& ctx) {
  const auto target = ctx.target_series(ctx.opts().target_path);
  const auto comps = competitor_series(ctx);
  if (comps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--competitor or --competitor-pattern is required");
  }
  std::vector<CompetitorFinding> findings;
  for (const auto& c : comps) findings.push_back(competitor_mirror(target, c, ctx.diag()));
  if (!ctx.opts().plot_out.empty()) {
    std::vector<NamedSeries> all{to_named(target)};
    for (const auto& c : comps) all.push_back(to_named(c));
    write_plot(ctx.opts().plot_out, all);
  }
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"competitor", "tau", "p_value", "n", "total_gain", "coverage_ratio",
                      "delta_mirror_tau", "underpowered", "verdict"});
      for (const auto& f : findings) {
        write_csv(out, {f.competitor_label, num(f.trend.tau), num(f.trend.p_value),
                        std::to_string(f.trend.n), num(f.total_gain), num(f.coverage_ratio),
                        num(f.delta_mirror_tau), f.underpowered ? "1" : "0",
                        std::string(to_string(f.verdict))});
      }
      return;
    case Format::kJson:
      out << competitors_to_json(findings);
      return;
    case Format::kTable:
      out << fmt::format("target {}\n", target.label);
      for (const auto& f : findings) {
        out << fmt::format("competitor      {}\n", f.competitor_label);
        out << fmt::format("  tau           {:.7f} (p {:.4g}, n {}{})\n", f.trend.tau,
                           f.trend.p_value, f.trend.n, f.underpowered ? ", underpowered" : "");
        out << fmt::format("  total gain    {:+.2f}\n", f.total_gain);
        out << fmt::format("  coverage      {:.3f}\n", f.coverage_ratio);
        out << fmt::format("  delta tau     {:.4f}\n", f.delta_mirror_tau);
        out << fmt::format("  verdict       {}\n", to_string(f.verdict));
      }
      return;
  }
}

// Seeds differ per decade so adding a decade never reshuffles the others.
std::uint64_t decade_seed(std::uint64_t seed, Decade d) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(d.start_year()));
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  return x;
}

void cmd_sample(Context& ctx) {
  const auto& idx = ctx.index();
  const auto m = ctx.matches();
  const auto n = ctx.opts().sample_n.value_or(ctx.settings().sample_size);
  const auto seed = ctx.settings().seed;

  std::map<Decade, MatchSet> by_decade;
  for (const auto& x : m) by_decade[x.decade].push_back(x);
  std::vector<Decade> wanted;
  if (ctx.opts().decades.empty()) {
    for (const auto& [d, v] : by_decade) wanted.push_back(d);
  } else {
    for (int y : ctx.opts().decades) {
      const Decade d(y);
      if (!by_decade.count(d)) {
        throw Error(ErrorCode::kEmptyMatchSet, fmt::format("no matches in decade {}", y));
      }
      wanted.push_back(d);
    }
  }
  if (wanted.empty()) throw Error(ErrorCode::kEmptyMatchSet, "the patterns match nothing");

  const auto series = frequency_series(m, idx, std::nullopt, Denominator::kSlice);
  std::vector<AnnotationTask> tasks;
  std::vector<DecadeBaseline> baselines;
  for (const auto& d : wanted) {
    const auto& pop = by_decade[d];
    double pmw = 0.0;
    for (const auto& p : series.points) {
      if (p.decade == d) pmw = p.pmw;
    }
    baselines.push_back({d, pmw, pop.size()});
    const auto drawn = draw_sample(std::span<const Match>(pop), n, decade_seed(seed, d),
                                   fmt::format("d{}-", d.start_year()));
    for (const auto& s : drawn) {
      const auto line = kwic(idx, s.item, ctx.settings().kwic_width);
      tasks.push_back({s.sample_id, d, s.item.genre, s.item.doc_id, s.item.sentence, s.item.start,
                       s.item.end, line.left, line.hit, line.right});
    }
  }

  if (!ctx.opts().session.empty()) {
    SessionHeader h;
    std::string key = fmt::format("{}|{}", idx.content_hash(), seed);
    for (const auto& p : ctx.settings().patterns) key += "|" + p;
    h.session_id = "s-" + content_hash(key);
    h.patterns = ctx.settings().patterns;
    h.seed = seed;
    h.index_hash = idx.content_hash();
    h.created = ctx.opts().timestamp.empty() ? utc_timestamp() : ctx.opts().timestamp;
    SessionStore::create(ctx.opts().session, h, baselines, tasks);
  }

  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"sample_id", "decade", "genre", "doc_id", "sentence_no", "start", "end",
                      "left", "hit", "right"});
      for (const auto& t : tasks) {
        write_csv(out, {t.sample_id, std::to_string(t.decade.start_year()), t.genre, t.doc_id,
                        std::to_string(t.sentence), std::to_string(t.start), std::to_string(t.end),
                        t.left, t.hit, t.right});
      }
      return;
    case Format::kJson: {
      json arr = json::array();
      for (const auto& t : tasks) {
        arr.push_back({{"sample_id", t.sample_id},
                       {"decade", t.decade.start_year()},
                       {"genre", t.genre},
                       {"doc_id", t.doc_id},
                       {"sentence_no", t.sentence},
                       {"start", t.start},
                       {"end", t.end},
                       {"left", t.left},
                       {"hit", t.hit},
                       {"right", t.right}});
      }
      out << json{{"seed", seed}, {"tasks", arr}}.dump(2) << "\n";
      return;
    }
    case Format::kTable:
      for (const auto& b : baselines) {
        int count = 0;
        for (const auto& t : tasks) count += t.decade == b.decade;
        out << fmt::format("decade {}: {} of {} matches sampled (seed {})\n",
                           b.decade.start_year(), count, b.match_count, seed);
      }
      for (const auto& t : tasks) {
        out << fmt::format("{}  {:>40} [{}] {}\n", t.sample_id, t.left, t.hit, t.right);
      }
      if (!ctx.opts().session.empty()) {
        out << fmt::format("session written to {}\n", ctx.opts().session);
      }
      return;
  }
}

std::atomic<AnnotationService*> g_service{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_service.load()) s->stop();
}

void cmd_serve(Context& ctx) {
  if (ctx.opts().session.empty()) throw Error(ErrorCode::kInvalidArgument, "--session is required");
  if (!fs::exists(ctx.opts().session)) {
    throw Error(ErrorCode::kNotFound, "session '" + ctx.opts().session + "' not found");
  }
  auto store = SessionStore::open(ctx.opts().session);
  std::optional<std::string> static_dir;
  if (!ctx.opts().static_dir.empty()) static_dir = ctx.opts().static_dir;
  AnnotationService service(store, static_dir);
  const int port = service.bind(ctx.opts().port);
  ctx.out() << fmt::format("serving session {} on http://127.0.0.1:{}/\n",
                           store.header().session_id, port)
            << std::flush;
  g_service = &service;
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  service.run();
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  g_service = nullptr;
}

void cmd_estimate(Context& ctx) {
  if (ctx.opts().session.empty()) throw Error(ErrorCode::kInvalidArgument, "--session is required");
  if (!fs::exists(ctx.opts().session)) {
    throw Error(ErrorCode::kNotFound, "session '" + ctx.opts().session + "' not found");
  }
  const auto store = SessionStore::open(ctx.opts().session);
  const auto rows = store.estimates();
  auto opt = [](const DecadeEstimate& e, double PurposiveEstimate::*field) {
    return e.estimate ? num((*e.estimate).*field) : std::string();
  };
  auto& out = ctx.out();
  switch (ctx.format()) {
    case Format::kCsv:
      write_csv(out, {"decade", "tasks", "purposive", "non_purposive", "unclear", "pending",
                      "total_pmw", "purposive_pmw", "non_purposive_pmw"});
      for (const auto& e : rows) {
        write_csv(out, {std::to_string(e.decade.start_year()), std::to_string(e.tasks),
                        std::to_string(e.purposive), std::to_string(e.non_purposive),
                        std::to_string(e.unclear), std::to_string(e.pending), num(e.total_pmw),
                        opt(e, &PurposiveEstimate::purposive_pmw),
                        opt(e, &PurposiveEstimate::non_purposive_pmw)});
      }
      return;
    case Format::kJson: {
      json arr = json::array();
      for (const auto& e : rows) {
        json j = {{"decade", e.decade.start_year()}, {"tasks", e.tasks},
                  {"purposive", e.purposive},       {"non_purposive", e.non_purposive},
                  {"unclear", e.unclear},           {"pending", e.pending},
                  {"total_pmw", e.total_pmw}};
        j["purposive_pmw"] = e.estimate ? json(e.estimate->purposive_pmw) : json(nullptr);
        j["non_purposive_pmw"] = e.estimate ? json(e.estimate->non_purposive_pmw) : json(nullptr);
        arr.push_back(j);
      }
      out << arr.dump(2) << "\n";
      return;
    }
    case Format::kTable:
      out << fmt::format("{:<8}{:>7}{:>7}{:>7}{:>9}{:>9}{:>11}{:>11}{:>11}\n", "decade", "tasks",
                         "purp", "non", "unclear", "pending", "total", "purposive", "non-purp");
      for (const auto& e : rows) {
        out << fmt::format("{:<8}{:>7}{:>7}{:>7}{:>9}{:>9}{:>11.2f}", e.decade.start_year(),
                           e.tasks, e.purposive, e.non_purposive, e.unclear, e.pending,
                           e.total_pmw);
        if (e.estimate) {
          out << fmt::format("{:>11.2f}{:>11.2f}\n", e.estimate->purposive_pmw,
                             e.estimate->non_purposive_pmw);
        } else {
          out << fmt::format("{:>11}{:>11}\n", "-", "-");
        }
      }
      return;
  }
}

std::optional<std::string> report_timestamp(const std::string& flag) {
  if (flag == "now") return utc_timestamp();
  if (!flag.empty()) return flag;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    const std::time_t t = std::strtoll(epoch, nullptr, 10);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
  }
  return std::nullopt;
}

// A symptom that cannot be evaluated on this corpus is reported as not
// detected, with the reason in its notes.
SymptomFinding untestable(Symptom symptom, const Error& e) {
  SymptomFinding f;
  f.symptom = symptom;
  f.detected = false;
  f.evidence.notes.push_back(std::string("not testable: ") + e.what());
  f.narrative = std::string("Not testable on this corpus: ") + e.what();
  return f;
}

void cmd_report(Context& ctx) {
  const auto& idx = ctx.index();
  const auto m = ctx.matches();
  auto label = ctx.opts().label.empty() ? ctx.pattern_label() : ctx.opts().label;
  const auto series = frequency_series(m, idx, std::nullopt, Denominator::kSlice, label);

  std::vector<SymptomFinding> findings;
  findings.push_back(check_negative_correlation(series, ctx.diag()));
  try {
    findings.push_back(run_fragmentation(ctx));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooFewGenres) throw;
    findings.push_back(untestable(Symptom::kDistributionalFragmentation, e));
  }
  try {
    findings.push_back(check_atrophy(idx, m, ctx.diag()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooFewPoints) throw;
    findings.push_back(untestable(Symptom::kParadigmaticAtrophy, e));
  }

  std::vector<CompetitorFinding> competitors;
  for (const auto& c : competitor_series(ctx)) {
    competitors.push_back(competitor_mirror(series, c, ctx.diag()));
  }
  ReportMetadata meta{idx.content_hash(), ctx.settings().seed,
                      report_timestamp(ctx.opts().timestamp)};
  const auto report = compile_report(label, std::move(findings), std::move(competitors),
                                     std::move(meta), ctx.diag());
  if (!ctx.opts().plot_out.empty()) {
    std::vector<NamedSeries> all;
    for (const auto& f : report.findings) {
      for (const auto& s : f.evidence.series) all.push_back(s);
    }
    write_plot(ctx.opts().plot_out, all);
  }
  if (ctx.format() == Format::kCsv) {
    throw Error(ErrorCode::kInvalidArgument, "report supports --format table or json");
  }
  ctx.out() << (ctx.format() == Format::kJson ? report_to_json(report) : report_to_text(report));
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* app, Options& o, bool corpus, bool patterns) {
  app->add_option("--config", o.common.config_path, "Settings file (key = value)");
  app->add_option("--format", o.common.format, "Output format: table, csv or json");
  if (corpus) {
    app->add_option("--corpus", o.common.corpus, "Vertical-format corpus file");
    app->add_option("--index-cache", o.common.index_cache, "Index cache file");
  }
  if (patterns) {
    app->add_option("--pattern,-p", o.common.patterns,
                    "Token pattern; repeat to sum several patterns");
    app->add_option("--genre", o.genre, "Restrict to one genre");
    app->add_option("--label", o.label, "Series label");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Diachronic corpus toolkit for diagnosing grammatical obsolescence", "obsolens"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "obsolens 0.1.0");

  std::string command;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&command, name] { command = name; });
    return s;
  };

  auto* ingest = sub("ingest", "Index a corpus and print its decade x genre token totals");
  add_common(ingest, o, true, false);

  auto* query = sub("query", "Match token patterns and print concordance lines");
  add_common(query, o, true, true);
  query->add_option("--width", o.common.width, "Context tokens on each side");
  query->add_option("--limit", o.limit, "Print at most this many lines (0 = all)");
  query->add_option("--series-out", o.series_out, "Also write the per-decade series CSV");

  auto* trend = sub("trend", "Kendall trend test of frequency against time");
  add_common(trend, o, true, true);
  trend->add_option("--series", o.series_path, "Series CSV (decade,count,token_total,pmw)");
  trend->add_option("--plot-out", o.plot_out, "Write tidy plot data (decade,series,value)");

  auto* deltas = sub("deltas", "Decade-to-decade differences and their total");
  add_common(deltas, o, true, true);
  deltas->add_option("--series", o.series_path, "Series CSV");

  auto* genres = sub("genres", "Genre shares of each decade's token total");
  add_common(genres, o, true, false);

  auto* fragment = sub("fragment", "Distributional fragmentation across genres");
  add_common(fragment, o, true, true);
  fragment->add_option("--plot-out", o.plot_out, "Write tidy plot data (decade,series,value)");

  auto* atrophy = sub("atrophy", "Paradigmatic atrophy: sentence position and negation");
  add_common(atrophy, o, true, true);

  auto* compete = sub("compete", "Does a competitor gain what the target loses?");
  add_common(compete, o, true, true);
  compete->add_option("--target", o.target_path, "Target series CSV");
  compete->add_option("--competitor", o.competitor_paths, "Competitor series CSV (repeatable)");
  compete->add_option("--competitor-pattern", o.competitor_patterns,
                      "Competitor token pattern (repeatable)");
  compete->add_option("--plot-out", o.plot_out, "Write tidy plot data (decade,series,value)");

  auto* sample = sub("sample", "Draw a seeded per-decade sample of matches for annotation");
  add_common(sample, o, true, true);
  sample->add_option("--seed", o.common.seed, "Random seed");
  sample->add_option("--n", o.sample_n, "Lines per decade");
  sample->add_option("--decade", o.decades, "Decade to sample (repeatable; default all)");
  sample->add_option("--width", o.common.width, "Context tokens on each side");
  sample->add_option("--session", o.session, "Create an annotation session file");
  sample->add_option("--timestamp", o.timestamp, "Creation time recorded in the session");

  auto* annotate = app.add_subcommand("annotate", "Annotation sessions");
  annotate->require_subcommand(1);
  auto* serve = annotate->add_subcommand("serve", "Serve the annotation HTTP API on loopback");
  serve->callback([&command] { command = "annotate serve"; });
  serve->add_option("--session", o.session, "Session file")->required();
  serve->add_option("--port", o.port, "Port (0 picks a free one)");
  serve->add_option("--static", o.static_dir, "Directory of UI assets to serve at /");
  serve->add_option("--config", o.common.config_path, "Settings file");
  auto* estimate = annotate->add_subcommand("estimate", "Purposive estimates from a session");
  estimate->callback([&command] { command = "annotate estimate"; });
  estimate->add_option("--session", o.session, "Session file")->required();
  add_common(estimate, o, false, false);

  auto* report = sub("report", "Run all symptom checks and derive a verdict");
  add_common(report, o, true, true);
  report->add_option("--seed", o.common.seed, "Seed recorded in the report metadata");
  report->add_option("--competitor", o.competitor_paths, "Competitor series CSV (repeatable)");
  report->add_option("--competitor-pattern", o.competitor_patterns,
                     "Competitor token pattern (repeatable)");
  report->add_option("--timestamp", o.timestamp, "Timestamp for the metadata ('now' for clock)");
  report->add_option("--plot-out", o.plot_out, "Write tidy plot data (decade,series,value)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "obsolens 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUserError;
  }

  try {
    Context ctx(o, out, err);
    if (command == "ingest") cmd_ingest(ctx);
    else if (command == "query") cmd_query(ctx);
    else if (command == "trend") cmd_trend(ctx);
    else if (command == "deltas") cmd_deltas(ctx);
    else if (command == "genres") cmd_genres(ctx);
    else if (command == "fragment") cmd_fragment(ctx);
    else if (command == "atrophy") cmd_atrophy(ctx);
    else if (command == "compete") cmd_compete(ctx);
    else if (command == "sample") cmd_sample(ctx);
    else if (command == "annotate serve") cmd_serve(ctx);
    else if (command == "annotate estimate") cmd_estimate(ctx);
    else if (command == "report") cmd_report(ctx);
    out.flush();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace obsolens::cli
