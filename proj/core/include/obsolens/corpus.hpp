#pragma once

// Vertical-format corpus model: documents carry year and genre metadata,
// sentences carry POS-tagged tokens.
//
//   #doc id=<string> year=<int> genre=<string>
//   surface<TAB>pos[<TAB>lemma]
//   <empty line closes a sentence>
//   ## comment

#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace obsolens {

struct Token {
  std::string surface;
  std::string norm;
  std::string pos;
  std::optional<std::string> lemma;
  std::uint32_t index = 0;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;

  bool operator==(const Sentence&) const = default;
};

class Decade {
 public:
  constexpr Decade() = default;
  // Throws Error(kInvalidArgument) unless start_year is a multiple of ten.
  explicit Decade(int start_year);

  constexpr int start_year() const noexcept { return start_year_; }
  auto operator<=>(const Decade&) const = default;

 private:
  int start_year_ = 0;
};

struct Document {
  std::string doc_id;
  int year = 0;
  std::string genre;
  std::vector<Sentence> sentences;

  Decade decade() const;
  std::size_t token_count() const;
  bool operator==(const Document&) const = default;
};

inline constexpr int kMinYear = 1500;
inline constexpr int kMaxYear = 2100;

Decade bucket_decade(int year);

// ASCII case fold. Bytes outside A-Z (including UTF-8 multibyte sequences)
// pass through unchanged.
std::string normalize_form(std::string_view surface);

std::vector<Document> parse_vertical(std::istream& in);
std::vector<Document> parse_vertical(std::string_view text);
std::vector<Document> parse_vertical_file(const std::string& path);

void write_vertical(std::ostream& out, const std::vector<Document>& docs);

std::size_t total_tokens(const std::vector<Document>& docs);

}  // namespace obsolens
