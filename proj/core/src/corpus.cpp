#include "obsolens/corpus.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "obsolens/error.hpp"

namespace obsolens {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool is_header(std::string_view line) {
  return line == "#doc" || line.starts_with("#doc ");
}

Document parse_header(std::string_view line, std::size_t line_no) {
  Document doc;
  bool have_id = false, have_year = false, have_genre = false;
  for (auto field : split(line.substr(4), ' ')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError(ErrorCode::kMalformedHeader, line_no,
                       "expected key=value, got '" + std::string(field) + "'");
    }
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "id") {
      doc.doc_id = value;
      have_id = !value.empty();
    } else if (key == "year") {
      int year = 0;
      const auto* end = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(value.data(), end, year);
      if (value.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(ErrorCode::kNonNumericYear, line_no,
                         "year '" + std::string(value) + "' is not an integer");
      }
      if (year < kMinYear || year > kMaxYear) {
        throw ParseError(ErrorCode::kYearOutOfRange, line_no,
                         "year " + std::to_string(year) + " outside [1500, 2100]");
      }
      doc.year = year;
      have_year = true;
    } else if (key == "genre") {
      doc.genre = value;
      have_genre = !value.empty();
    }
    // Unknown keys are tolerated and dropped.
  }
  if (!have_id || !have_year || !have_genre) {
    throw ParseError(ErrorCode::kMalformedHeader, line_no, "header needs id, year and genre");
  }
  return doc;
}

}  // namespace

Decade::Decade(int start_year) : start_year_(start_year) {
  if (start_year % 10 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "decade start " + std::to_string(start_year) + " is not a multiple of 10");
  }
}

Decade Document::decade() const { return bucket_decade(year); }

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

Decade bucket_decade(int year) {
  // Floor toward negative infinity so the window stays 10 wide for any year.
  int r = year % 10;
  if (r < 0) r += 10;
  return Decade(year - r);
}

std::string normalize_form(std::string_view surface) {
  std::string out(surface);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<Document> parse_vertical(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  Sentence current;
  std::string line;
  std::size_t line_no = 0;

  auto close_sentence = [&] {
    if (!current.tokens.empty()) {
      docs.back().sentences.push_back(std::move(current));
      current = Sentence{};
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);

    if (view.starts_with("##")) continue;
    if (view.empty()) {
      if (!docs.empty()) close_sentence();
      continue;
    }
    if (is_header(view)) {
      if (!docs.empty()) close_sentence();
      auto doc = parse_header(view, line_no);
      if (!seen_ids.insert(doc.doc_id).second) {
        throw ParseError(ErrorCode::kMalformedHeader, line_no,
                         "duplicate document id '" + doc.doc_id + "'");
      }
      docs.push_back(std::move(doc));
      continue;
    }

    const auto fields = split(view, '\t');
    if (fields.size() < 2) {
      throw ParseError(ErrorCode::kBadTokenLine, line_no, "token line needs surface<TAB>pos");
    }
    if (fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(ErrorCode::kBadTokenLine, line_no, "malformed token line");
    }
    if (docs.empty()) {
      throw ParseError(ErrorCode::kMalformedHeader, line_no, "token line before any #doc header");
    }
    Token tok;
    tok.surface = fields[0];
    tok.norm = normalize_form(tok.surface);
    tok.pos = fields[1];
    if (fields.size() == 3) tok.lemma = std::string(fields[2]);
    tok.index = static_cast<std::uint32_t>(current.tokens.size());
    current.tokens.push_back(std::move(tok));
  }
  if (!docs.empty()) close_sentence();
  return docs;
}

std::vector<Document> parse_vertical(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_vertical(in);
}

std::vector<Document> parse_vertical_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus file '" + path + "'");
  return parse_vertical(in);
}

void write_vertical(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& doc : docs) {
    out << "#doc id=" << doc.doc_id << " year=" << doc.year << " genre=" << doc.genre << '\n';
    for (const auto& sentence : doc.sentences) {
      for (const auto& tok : sentence.tokens) {
        out << tok.surface << '\t' << tok.pos;
        if (tok.lemma) out << '\t' << *tok.lemma;
        out << '\n';
      }
      out << '\n';
    }
  }
}

std::size_t total_tokens(const std::vector<Document>& docs) {
  return std::accumulate(docs.begin(), docs.end(), std::size_t{0},
                         [](std::size_t acc, const Document& d) { return acc + d.token_count(); });
}

}  // namespace obsolens
