#include "obsolens/query.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "obsolens/csv.hpp"
#include "obsolens/error.hpp"

namespace obsolens {

namespace {

char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool tag_matches(const TagConstraint& tag, std::string_view pos) {
  if (tag.exact ? pos.size() != tag.prefix.size() : pos.size() < tag.prefix.size()) return false;
  for (std::size_t i = 0; i < tag.prefix.size(); ++i) {
    if (fold(pos[i]) != tag.prefix[i]) return false;
  }
  return true;
}

bool window_matches(const QueryPattern& pattern, const Sentence& sentence, std::size_t start) {
  if (start + pattern.size() > sentence.tokens.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (!element_matches(pattern.elements[i], sentence.tokens[start + i])) return false;
  }
  return true;
}

Match make_match(const CorpusIndex& index, std::uint32_t doc, std::uint32_t sentence,
                 std::uint32_t start, std::size_t length) {
  const auto& d = index.document(doc);
  return Match{doc, sentence, start, static_cast<std::uint32_t>(start + length - 1),
               d.decade(), d.genre, d.doc_id};
}

std::string join(const std::vector<Token>& tokens, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

}  // namespace

QueryPattern parse_pattern(std::string_view text) {
  QueryPattern pattern;
  pattern.source = std::string(text);
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    if (word == "*") {
      pattern.elements.emplace_back(Wildcard{});
    } else if (word.front() == '_') {
      std::string tag = normalize_form(word.substr(1));
      bool exact = true;
      if (!tag.empty() && tag.back() == '*') {
        tag.pop_back();
        exact = false;
      }
      if (tag.empty()) {
        throw Error(ErrorCode::kBareUnderscore, "tag element '" + word + "' names no tag");
      }
      pattern.elements.emplace_back(TagConstraint{std::move(tag), exact});
    } else {
      pattern.elements.emplace_back(Literal{normalize_form(word)});
    }
  }
  if (pattern.elements.empty()) throw Error(ErrorCode::kEmptyPattern, "pattern is empty");
  const bool all_wild = std::all_of(pattern.elements.begin(), pattern.elements.end(),
                                    [](const auto& e) { return std::holds_alternative<Wildcard>(e); });
  if (all_wild) {
    throw Error(ErrorCode::kAllWildcards, "pattern '" + pattern.source + "' has only wildcards");
  }
  return pattern;
}

bool element_matches(const PatternElement& element, const Token& token) {
  return std::visit(
      [&](const auto& e) -> bool {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return token.norm == e.form;
        } else if constexpr (std::is_same_v<T, Wildcard>) {
          return true;
        } else {
          return tag_matches(e, token.pos);
        }
      },
      element);
}

bool match_order(const Match& a, const Match& b) {
  return std::tie(a.doc, a.sentence, a.start, a.end) < std::tie(b.doc, b.sentence, b.start, b.end);
}

MatchSet match_pattern(const CorpusIndex& index, const QueryPattern& pattern) {
  MatchSet out;
  if (pattern.elements.empty()) return out;

  // Anchor on the rarest literal; fall back to a full scan for tag-only patterns.
  std::size_t anchor = pattern.size();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (const auto* lit = std::get_if<Literal>(&pattern.elements[i])) {
      const auto n = index.postings(lit->form).size();
      if (n < best) {
        best = n;
        anchor = i;
      }
    }
  }

  if (anchor < pattern.size()) {
    const auto& lit = std::get<Literal>(pattern.elements[anchor]);
    for (const auto& p : index.postings(lit.form)) {
      if (p.token < anchor) continue;
      const auto start = static_cast<std::uint32_t>(p.token - anchor);
      if (window_matches(pattern, index.sentence(p.doc, p.sentence), start)) {
        out.push_back(make_match(index, p.doc, p.sentence, start, pattern.size()));
      }
    }
  } else {
    const auto& docs = index.documents();
    for (std::uint32_t d = 0; d < docs.size(); ++d) {
      for (std::uint32_t s = 0; s < docs[d].sentences.size(); ++s) {
        const auto& sentence = docs[d].sentences[s];
        for (std::uint32_t t = 0; t < sentence.tokens.size(); ++t) {
          if (window_matches(pattern, sentence, t)) {
            out.push_back(make_match(index, d, s, t, pattern.size()));
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), match_order);
  return out;
}

MatchSet match_patterns(const CorpusIndex& index, std::span<const QueryPattern> patterns) {
  MatchSet out;
  for (const auto& p : patterns) {
    auto m = match_pattern(index, p);
    out.insert(out.end(), std::make_move_iterator(m.begin()), std::make_move_iterator(m.end()));
  }
  std::stable_sort(out.begin(), out.end(), match_order);
  return out;
}

ConcordanceLine kwic(const CorpusIndex& index, const Match& match, std::size_t width) {
  const auto& tokens = index.sentence(match.doc, match.sentence).tokens;
  const std::size_t left_from = match.start >= width ? match.start - width : 0;
  const std::size_t right_to = std::min(tokens.size(), static_cast<std::size_t>(match.end) + 1 + width);
  return ConcordanceLine{join(tokens, left_from, match.start),
                         join(tokens, match.start, match.end + 1),
                         join(tokens, match.end + 1, right_to), match};
}

FrequencySeries frequency_series(const MatchSet& matches, const CorpusIndex& index,
                                 std::optional<std::string_view> genre_filter,
                                 Denominator denominator, std::string label) {
  std::map<Decade, std::uint64_t> counts;
  for (const auto& m : matches) {
    if (genre_filter && m.genre != *genre_filter) continue;
    ++counts[m.decade];
  }
  FrequencySeries series{std::move(label), {}};
  for (const auto decade : index.decades()) {
    const auto total = denominator == Denominator::kSlice
                           ? token_totals(index, decade, genre_filter)
                           : token_totals(index, decade);
    if (total == 0) continue;
    const auto it = counts.find(decade);
    const std::uint64_t count = it == counts.end() ? 0 : it->second;
    series.points.push_back({decade, count, total, per_million(count, total)});
  }
  return series;
}

void write_matches_csv(std::ostream& out, const CorpusIndex& index, const MatchSet& matches,
                       std::size_t width) {
  csv::write_row(out, {"doc_id", "year", "decade", "genre", "sentence_no", "start", "end", "hit",
                       "left", "right"});
  for (const auto& m : matches) {
    const auto line = kwic(index, m, width);
    csv::write_row(out, {m.doc_id, std::to_string(index.document(m.doc).year),
                         std::to_string(m.decade.start_year()), m.genre,
                         std::to_string(m.sentence), std::to_string(m.start),
                         std::to_string(m.end), line.hit, line.left, line.right});
  }
}

}  // namespace obsolens
