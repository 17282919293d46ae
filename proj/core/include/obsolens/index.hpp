#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "obsolens/corpus.hpp"

namespace obsolens {

struct Posting {
  std::uint32_t doc = 0;
  std::uint32_t sentence = 0;
  std::uint32_t token = 0;

  auto operator<=>(const Posting&) const = default;
};

using SliceKey = std::pair<Decade, std::string>;

// Share of each genre in one decade's token total.
using GenreShareRow = std::map<std::string, double, std::less<>>;
using GenreShareTable = std::map<Decade, GenreShareRow>;

// Immutable after construction; safe for any number of concurrent readers.
class CorpusIndex {
 public:
  CorpusIndex() = default;

  const std::vector<Document>& documents() const noexcept { return *docs_; }
  const Document& document(std::uint32_t doc) const { return docs_->at(doc); }
  const Sentence& sentence(std::uint32_t doc, std::uint32_t sentence) const {
    return docs_->at(doc).sentences.at(sentence);
  }

  // Empty span when the form never occurs.
  std::span<const Posting> postings(std::string_view norm) const;
  std::size_t vocabulary_size() const noexcept { return postings_.size(); }

  const std::map<SliceKey, std::uint64_t>& slice_totals() const noexcept { return slice_totals_; }
  const std::vector<Decade>& decades() const noexcept { return decades_; }
  const std::vector<std::string>& genres() const noexcept { return genres_; }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  // Hex FNV-1a 64 of the corpus bytes the index was built from.
  const std::string& content_hash() const noexcept { return content_hash_; }

 private:
  friend CorpusIndex build_index(std::vector<Document> documents, std::string content_hash);
  friend class IndexCacheAccess;

  std::shared_ptr<const std::vector<Document>> docs_ =
      std::make_shared<const std::vector<Document>>();
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::map<SliceKey, std::uint64_t> slice_totals_;
  std::vector<Decade> decades_;
  std::vector<std::string> genres_;
  std::uint64_t total_tokens_ = 0;
  std::string content_hash_;
};

std::string content_hash(std::string_view bytes);

// When content_hash is empty it is computed over the vertical serialization
// of the documents.
CorpusIndex build_index(std::vector<Document> documents, std::string content_hash = {});

// Reads, hashes and indexes a vertical-format file.
CorpusIndex index_corpus_file(const std::string& path);

// Genre omitted: sum over every genre of that decade. Absent slice: 0.
std::uint64_t token_totals(const CorpusIndex& index, Decade decade,
                           std::optional<std::string_view> genre = std::nullopt);

// Throws Error(kEmptyDecade) when the decade holds no tokens.
GenreShareRow genre_shares(const CorpusIndex& index, Decade decade);

// Every decade present in the index.
GenreShareTable genre_share_table(const CorpusIndex& index);

// Binary cache. load returns nullopt when the file is missing, from another
// format version, or was built from different corpus bytes.
void save_index_cache(const CorpusIndex& index, const std::string& path);
std::optional<CorpusIndex> load_index_cache(const std::string& path,
                                            std::string_view expected_hash);

}  // namespace obsolens
