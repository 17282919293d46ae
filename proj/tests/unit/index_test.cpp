#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "obsolens/error.hpp"
#include "obsolens/index.hpp"
#include "support/oracles.hpp"

using namespace obsolens;

namespace {

Document make_doc(std::string id, int year, std::string genre, std::size_t tokens) {
  Document d{std::move(id), year, std::move(genre), {Sentence{}}};
  for (std::size_t i = 0; i < tokens; ++i) {
    d.sentences[0].tokens.push_back({"w", "w", "nn1", std::nullopt, static_cast<std::uint32_t>(i)});
  }
  return d;
}

CorpusIndex composition(const std::vector<std::pair<std::string, std::size_t>>& parts, int year) {
  std::vector<Document> docs;
  for (const auto& [g, n] : parts) docs.push_back(make_doc(g + "1", year, g, n));
  return build_index(std::move(docs));
}

}  // namespace

TEST_SUITE("index") {

TEST_CASE("slice totals add up within a slice") {
  const auto idx = build_index({make_doc("a", 1901, "fic", 10), make_doc("b", 1908, "fic", 10)});
  REQUIRE(idx.slice_totals().size() == 1);
  CHECK(idx.slice_totals().at({Decade(1900), "fic"}) == 20);
  CHECK(idx.total_tokens() == 20);
}

TEST_CASE("empty corpus gives an empty index") {
  const auto idx = build_index({});
  CHECK(idx.slice_totals().empty());
  CHECK(idx.vocabulary_size() == 0);
  CHECK(idx.postings("in").empty());
  CHECK(idx.decades().empty());
}

TEST_CASE("years bucket into their own decades") {
  const auto idx = build_index({make_doc("a", 1905, "g", 3), make_doc("b", 1912, "g", 4)});
  CHECK(idx.slice_totals().at({Decade(1900), "g"}) == 3);
  CHECK(idx.slice_totals().at({Decade(1910), "g"}) == 4);
  CHECK(idx.decades() == std::vector<Decade>{Decade(1900), Decade(1910)});
}

TEST_CASE("token_totals over the fixture match a raw recount and the generator plan") {
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  const auto raw = oracle::raw_slice_totals(oracle::read_raw(oracle::slurp(oracle::fixture("corpus.vrt"))));
  const auto plan = nlohmann::json::parse(oracle::slurp(oracle::fixture("corpus_plan.json")));
  std::uint64_t all = 0;
  for (const auto& slice : plan["slices"]) {
    const int decade = slice["decade"];
    const std::string genre = slice["genre"];
    const std::uint64_t tokens = slice["tokens"];
    CHECK(raw.at({decade, genre}) == tokens);
    CHECK(token_totals(idx, Decade(decade), genre) == tokens);
    all += tokens;
  }
  CHECK(idx.total_tokens() == all);
  for (const int d : plan["decades"]) {
    std::uint64_t decade_sum = 0;
    for (const auto& [key, n] : raw) decade_sum += key.first == d ? n : 0;
    CHECK(token_totals(idx, Decade(d)) == decade_sum);
  }
  CHECK(token_totals(idx, Decade(1700)) == 0);
  CHECK(token_totals(idx, Decade(1900), "poetry") == 0);
}

TEST_CASE("postings of a literal equal a linear scan") {
  const auto text = oracle::slurp(oracle::fixture("corpus.vrt"));
  const auto idx = build_index(parse_vertical(text));
  const auto raw = oracle::read_raw(text);
  for (const std::string form : {"in", "that", "so", "not", ".", "order", "for"}) {
    std::vector<Posting> expected;
    for (std::size_t d = 0; d < raw.size(); ++d) {
      for (std::size_t s = 0; s < raw[d].sentences.size(); ++s) {
        for (std::size_t t = 0; t < raw[d].sentences[s].size(); ++t) {
          if (oracle::lower(raw[d].sentences[s][t].surface) == form) {
            expected.push_back({static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(s),
                                static_cast<std::uint32_t>(t)});
          }
        }
      }
    }
    const auto got = idx.postings(form);
    CHECK_MESSAGE(std::vector<Posting>(got.begin(), got.end()) == expected, form);
  }
}

TEST_CASE("1890-style composition gives the published shares") {
  const auto idx = composition({{"fic", 55}, {"news", 7}, {"mag", 23}, {"nf", 15}}, 1895);
  const auto row = genre_shares(idx, Decade(1890));
  CHECK(row.at("fic") == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(row.at("news") == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(row.at("mag") == doctest::Approx(0.23).epsilon(1e-12));
  CHECK(row.at("nf") == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("1990-style composition with a residual genre") {
  const auto idx =
      composition({{"fic", 47}, {"news", 14}, {"mag", 26}, {"nf", 11}, {"other", 2}}, 1990);
  const auto row = genre_shares(idx, Decade(1990));
  CHECK(row.at("fic") == doctest::Approx(0.47).epsilon(1e-12));
  CHECK(row.at("news") == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(row.at("mag") == doctest::Approx(0.26).epsilon(1e-12));
  CHECK(row.at("nf") == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(row.at("other") == doctest::Approx(0.02).epsilon(1e-12));
  double sum = 0;
  for (const auto& [g, s] : row) sum += s;
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("single genre has share one; empty decade is an error") {
  const auto idx = composition({{"fic", 9}}, 1930);
  CHECK(genre_shares(idx, Decade(1930)).at("fic") == 1.0);
  try {
    genre_shares(idx, Decade(1940));
    FAIL("expected EmptyDecade");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyDecade);
  }
}

TEST_CASE("fixture shares sum to one in every decade") {
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  for (const auto& [d, row] : genre_share_table(idx)) {
    double sum = 0;
    for (const auto& [g, s] : row) sum += s;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("content hash is stable and sensitive") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
  CHECK(content_hash("").size() == 16);
}

TEST_CASE("index cache round-trips and goes stale with the corpus") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "obsolens_index_cache_test";
  fs::create_directories(dir);
  const auto cache = (dir / "fixture.idx").string();
  fs::remove(cache);

  const auto text = oracle::slurp(oracle::fixture("corpus.vrt"));
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  save_index_cache(idx, cache);
  const auto loaded = load_index_cache(cache, content_hash(text));
  REQUIRE(loaded.has_value());
  CHECK(loaded->content_hash() == idx.content_hash());
  CHECK(loaded->slice_totals() == idx.slice_totals());
  CHECK(loaded->documents() == idx.documents());
  const auto a = idx.postings("that");
  const auto b = loaded->postings("that");
  CHECK(std::vector<Posting>(a.begin(), a.end()) == std::vector<Posting>(b.begin(), b.end()));

  CHECK_FALSE(load_index_cache(cache, content_hash(text + "x")).has_value());
  fs::remove_all(dir);
}

}
