#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "doctest.h"
#include "json.hpp"
#include "obsolens/error.hpp"
#include "support/oracles.hpp"
#include "support/session_fixture.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = obsolens::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus() { return oracle::fixture("corpus.vrt"); }

const std::vector<std::string> kSoThat = {"-p", "so that * _vm*", "-p", "so that * * _vm*",
                                          "-p", "so that * * * _vm*"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("trend on the published series") {
  const auto r = run({"trend", "--series", oracle::fixture("in_order_that.csv")});
  CHECK(r.code == 0);
  CHECK(r.out.find("-0.9636364") != std::string::npos);
  CHECK(r.out.find("5.511e-07") != std::string::npos);
}

TEST_CASE("missing series file") {
  const auto r = run({"trend", "--series", "missing.csv"});
  CHECK(r.code == 1);
  CHECK(r.err.find("not found") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("compete: in order for * to") {
  const auto r = run({"compete", "--target", oracle::fixture("in_order_that.csv"), "--competitor",
                      oracle::fixture("in_order_for_to.csv"), "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j[0]["verdict"] == "insufficient_gain");
  CHECK(j[0]["coverage_ratio"].get<double>() == doctest::Approx(0.056).epsilon(0.01));
}

TEST_CASE("usage errors") {
  auto r = run({"trend", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"trend", "--series", oracle::fixture("in_order_that.csv"), "--format", "xml"}).code == 1);
  CHECK(run({"query", "--corpus", corpus()}).code == 1);
  CHECK(run({"query", "--corpus", corpus(), "-p", "*"}).code == 1);
  CHECK(run({"ingest", "--corpus", "nope.vrt"}).code == 1);
  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("annotate") != std::string::npos);
}

TEST_CASE("ingest csv matches the fixture totals") {
  const auto r = run({"ingest", "--corpus", corpus(), "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto plan = json::parse(oracle::slurp(oracle::fixture("corpus_plan.json")));
  for (const auto& s : plan["slices"]) {
    const auto row = std::to_string(s["decade"].get<int>()) + "," + s["genre"].get<std::string>() +
                     "," + std::to_string(s["tokens"].get<int>()) + "\r\n";
    CHECK(r.out.find(row) != std::string::npos);
  }
}

TEST_CASE("repeated patterns are summed per decade") {
  const auto one = [](const std::string& p) {
    const auto r = run({"query", "--corpus", corpus(), "-p", p, "--format", "json"});
    REQUIRE(r.code == 0);
    return json::parse(r.out)["count"].get<int>();
  };
  const auto r = run(with({"query", "--corpus", corpus(), "--format", "json"}, kSoThat));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["count"] ==
        one("so that * _vm*") + one("so that * * _vm*") + one("so that * * * _vm*"));
}

TEST_CASE("plot data is tidy") {
  testing::TempDir dir;
  const auto plot = dir.file("trend.csv");
  CHECK(run({"trend", "--series", oracle::fixture("in_order_that.csv"), "--plot-out", plot}).code == 0);
  const auto text = oracle::slurp(plot);
  CHECK(text.rfind("decade,series,value\r\n1900,in_order_that,19.5\r\n", 0) == 0);

  const auto frag = dir.file("frag.csv");
  CHECK(run({"fragment", "--corpus", corpus(), "-p", "in order that", "--plot-out", frag}).code == 0);
  std::istringstream in(oracle::slurp(frag));
  std::string line;
  std::getline(in, line);
  CHECK(line == "decade,series,value\r");
  std::set<std::string> labels;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    labels.insert(line.substr(5, line.find(',', 5) - 5));
  }
  CHECK(rows == 40);
  CHECK(labels == std::set<std::string>{"extrapolated:fic", "extrapolated:mag",
                                        "extrapolated:news", "extrapolated:nf"});
}

TEST_CASE("end-to-end report on the fixture corpus") {
  const auto r = run({"report", "--corpus", corpus(), "-p", "in order that", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["verdict"] == "OBSOLESCENT_LIKELY");
  CHECK(j["findings"][0]["symptom"] == "NegativeCorrelation");
  CHECK(j["findings"][0]["detected"] == true);
  CHECK(j["findings"][1]["detected"] == true);
  CHECK(j["findings"][2]["detected"] == false);
  CHECK(j["metadata"]["seed"] == obsolens::cli::kDefaultSeed);
  CHECK(j["metadata"]["timestamp"].is_null());
  CHECK(j["metadata"]["corpus_hash"].get<std::string>().size() == 16);

  const auto text = run({"report", "--corpus", corpus(), "-p", "in order that"});
  CHECK(text.out.find("OBSOLESCENT_LIKELY") != std::string::npos);
  const auto stamped = run({"report", "--corpus", corpus(), "-p", "in order that", "--format",
                            "json", "--timestamp", "2021-04-19T12:00:00Z"});
  CHECK(json::parse(stamped.out)["metadata"]["timestamp"] == "2021-04-19T12:00:00Z");
}

TEST_CASE("command outputs are byte-identical across runs") {
  testing::TempDir dir;
  const std::vector<std::vector<std::string>> commands = {
      {"ingest", "--corpus", corpus(), "--format", "json"},
      {"genres", "--corpus", corpus(), "--format", "csv"},
      {"query", "--corpus", corpus(), "-p", "in order that", "--format", "csv"},
      {"trend", "--corpus", corpus(), "-p", "in order that", "--format", "json"},
      {"deltas", "--series", oracle::fixture("so_that_purposive.csv"), "--format", "csv"},
      {"fragment", "--corpus", corpus(), "-p", "in order that", "--format", "json"},
      {"atrophy", "--corpus", corpus(), "-p", "in order that", "--format", "csv"},
      {"compete", "--target", oracle::fixture("in_order_that.csv"), "--competitor",
       oracle::fixture("so_purposive.csv"), "--format", "csv"},
      with({"sample", "--corpus", corpus(), "--n", "7", "--seed", "99", "--format", "json"}, kSoThat),
      {"report", "--corpus", corpus(), "-p", "in order that", "--format", "json"},
  };
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    CHECK_MESSAGE(a.code == 0, c[0] << ": " << a.err);
    CHECK_MESSAGE(a.out == b.out, c[0]);
    CHECK(!a.out.empty());
  }
}

TEST_CASE("the seed drives sampling") {
  const auto base = with({"sample", "--corpus", corpus(), "--n", "5", "--format", "csv"}, kSoThat);
  const auto a = run(with(base, {"--seed", "1"}));
  const auto b = run(with(base, {"--seed", "2"}));
  const auto d = run(base);
  const auto e = run(with(base, {"--seed", std::to_string(obsolens::cli::kDefaultSeed)}));
  CHECK(a.code == 0);
  CHECK(a.out != b.out);
  CHECK(d.out == e.out);
  // Adding a decade leaves the other decades' draws alone.
  const auto one = run(with(base, {"--decade", "1950"}));
  const auto two = run(with(base, {"--decade", "1950", "--decade", "1900"}));
  std::istringstream in(one.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) CHECK(two.out.find(line) != std::string::npos);
}

TEST_CASE("sample into a session, then estimate") {
  testing::TempDir dir;
  const auto session = dir.file("session.jsonl");
  auto r = run(with({"sample", "--corpus", corpus(), "--n", "4", "--decade", "1900", "--session",
                     session, "--timestamp", "2021-04-19T00:00:00Z"},
                    kSoThat));
  REQUIRE(r.code == 0);
  auto store = obsolens::SessionStore::open(session);
  CHECK(store.tasks().size() == 4);
  CHECK(store.header().patterns.size() == 3);
  store.annotate({"d1900-0001", obsolens::Label::kPurposive, "t", ""});
  store.annotate({"d1900-0002", obsolens::Label::kNonPurposive, "t", ""});

  r = run({"annotate", "estimate", "--session", session, "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const double total = j[0]["total_pmw"];
  CHECK(j[0]["purposive_pmw"].get<double>() == doctest::Approx(total / 2));

  CHECK(run(with({"sample", "--corpus", corpus(), "--session", session}, kSoThat)).code == 1);
  CHECK(run({"annotate", "estimate", "--session", dir.file("none.jsonl")}).code == 1);
  CHECK(run({"annotate", "serve", "--session", dir.file("none.jsonl")}).code == 1);
}

TEST_CASE("index cache is used transparently") {
  testing::TempDir dir;
  const auto cache = dir.file("corpus.idx");
  const auto a = run({"trend", "--corpus", corpus(), "--index-cache", cache, "-p", "in order that",
                      "--format", "csv"});
  CHECK(std::filesystem::exists(cache));
  const auto b = run({"trend", "--corpus", corpus(), "--index-cache", cache, "-p", "in order that",
                      "--format", "csv"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("settings file") {
  testing::TempDir dir;
  const auto conf = dir.file("obsolens.conf");
  {
    std::ofstream out(conf);
    out << "# test settings\nalpha = 0.005\npattern = in order that\nseed = 7\n";
  }
  const auto s = obsolens::cli::load_settings(conf);
  CHECK(s.diagnostics.alpha == 0.005);
  CHECK(s.seed == 7);
  CHECK(s.patterns == std::vector<std::string>{"in order that"});

  // alpha 0.005 turns the so-that decline into a non-detection.
  const auto r = run({"trend", "--config", conf, "--series", oracle::fixture("so_that_purposive.csv")});
  CHECK(r.code == 0);
  CHECK(r.out.find("no significant trend") != std::string::npos);

  // The pattern comes from the file when no --pattern is given.
  const auto q = run({"query", "--config", conf, "--corpus", corpus(), "--format", "json"});
  CHECK(q.code == 0);
  CHECK(json::parse(q.out)["count"] == 334);

  ::setenv("OBSOLENS_CONFIG", conf.c_str(), 1);
  CHECK(obsolens::cli::load_settings(std::nullopt).seed == 7);
  ::unsetenv("OBSOLENS_CONFIG");

  CHECK_THROWS_AS(obsolens::cli::parse_settings("colour = blue\n"), obsolens::Error);
  CHECK_THROWS_AS(obsolens::cli::parse_settings("alpha = lots\n"), obsolens::Error);
  CHECK_THROWS_AS(obsolens::cli::parse_settings("alpha = 2\n"), obsolens::Error);
  const auto tags = obsolens::cli::parse_settings("punctuation_tags = y, \",\", PUNC\n");
  CHECK(tags.diagnostics.punctuation_tags == std::set<std::string, std::less<>>{"y", ",", "punc"});
  CHECK(run({"trend", "--config", dir.file("missing.conf"), "--series",
             oracle::fixture("in_order_that.csv")}).code == 1);
}

}
