#pragma once

// Token-pattern language:
//   word    literal, compared case-insensitively against the token form
//   *       exactly one token of any kind (punctuation included)
//   _tag    POS tag equal to "tag" (case-insensitive)
//   _tag*   POS tag starting with "tag"
// Elements are whitespace separated; matches never cross a sentence boundary.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "obsolens/corpus.hpp"
#include "obsolens/index.hpp"
#include "obsolens/stats.hpp"

namespace obsolens {

struct Literal {
  std::string form;
  bool operator==(const Literal&) const = default;
};

struct Wildcard {
  bool operator==(const Wildcard&) const = default;
};

struct TagConstraint {
  std::string prefix;
  bool exact = true;
  bool operator==(const TagConstraint&) const = default;
};

using PatternElement = std::variant<Literal, Wildcard, TagConstraint>;

struct QueryPattern {
  std::vector<PatternElement> elements;
  std::string source;

  std::size_t size() const noexcept { return elements.size(); }
};

QueryPattern parse_pattern(std::string_view text);

bool element_matches(const PatternElement& element, const Token& token);

struct Match {
  std::uint32_t doc = 0;
  std::uint32_t sentence = 0;
  std::uint32_t start = 0;
  std::uint32_t end = 0;  // inclusive
  Decade decade;
  std::string genre;
  std::string doc_id;

  std::uint32_t length() const noexcept { return end - start + 1; }
  bool operator==(const Match&) const = default;
};

// Ordered by (doc, sentence, start), then end.
bool match_order(const Match& a, const Match& b);

using MatchSet = std::vector<Match>;

MatchSet match_pattern(const CorpusIndex& index, const QueryPattern& pattern);

// Concatenation of per-pattern results, re-sorted. Identical spans found by
// different patterns are kept: multi-pattern counts are sums.
MatchSet match_patterns(const CorpusIndex& index, std::span<const QueryPattern> patterns);

struct ConcordanceLine {
  std::string left;
  std::string hit;
  std::string right;
  Match match;
};

ConcordanceLine kwic(const CorpusIndex& index, const Match& match, std::size_t width);

enum class Denominator {
  kSlice,   // tokens of the filtered genre in that decade
  kDecade,  // all tokens of the decade, whatever the filter
};

// One point per decade that has a non-zero denominator.
FrequencySeries frequency_series(const MatchSet& matches, const CorpusIndex& index,
                                 std::optional<std::string_view> genre_filter = std::nullopt,
                                 Denominator denominator = Denominator::kSlice,
                                 std::string label = {});

// doc_id,year,decade,genre,sentence_no,start,end,hit,left,right
void write_matches_csv(std::ostream& out, const CorpusIndex& index, const MatchSet& matches,
                       std::size_t width);

}  // namespace obsolens
