#include "obsolens/index.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/map.hpp>
#include <cereal/types/optional.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/utility.hpp>
#include <cereal/types/vector.hpp>

#include "obsolens/error.hpp"

namespace obsolens {

template <class Archive>
void save(Archive& ar, const Decade& d) {
  ar(d.start_year());
}

template <class Archive>
void load(Archive& ar, Decade& d) {
  int start = 0;
  ar(start);
  d = Decade(start);
}

template <class Archive>
void serialize(Archive& ar, Token& t) {
  ar(t.surface, t.norm, t.pos, t.lemma, t.index);
}

template <class Archive>
void serialize(Archive& ar, Sentence& s) {
  ar(s.tokens);
}

template <class Archive>
void serialize(Archive& ar, Document& d) {
  ar(d.doc_id, d.year, d.genre, d.sentences);
}

template <class Archive>
void serialize(Archive& ar, Posting& p) {
  ar(p.doc, p.sentence, p.token);
}

namespace {

constexpr std::string_view kCacheMagic = "OBSLIDX";
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::span<const Posting> CorpusIndex::postings(std::string_view norm) const {
  const auto it = postings_.find(norm);
  if (it == postings_.end()) return {};
  return it->second;
}

CorpusIndex build_index(std::vector<Document> documents, std::string hash) {
  if (hash.empty()) {
    std::ostringstream out;
    write_vertical(out, documents);
    hash = content_hash(out.str());
  }

  CorpusIndex index;
  std::set<Decade> decades;
  std::set<std::string> genres;
  for (std::uint32_t d = 0; d < documents.size(); ++d) {
    const auto& doc = documents[d];
    const auto n = doc.token_count();
    // Documents without tokens still contribute their decade/genre.
    index.slice_totals_[{doc.decade(), doc.genre}] += n;
    index.total_tokens_ += n;
    decades.insert(doc.decade());
    genres.insert(doc.genre);
    for (std::uint32_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& tokens = doc.sentences[s].tokens;
      for (std::uint32_t t = 0; t < tokens.size(); ++t) {
        index.postings_[tokens[t].norm].push_back({d, s, t});
      }
    }
  }
  index.decades_.assign(decades.begin(), decades.end());
  index.genres_.assign(genres.begin(), genres.end());
  index.docs_ = std::make_shared<const std::vector<Document>>(std::move(documents));
  index.content_hash_ = std::move(hash);
  return index;
}

CorpusIndex index_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus file '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto docs = parse_vertical(std::string_view(bytes));
  return build_index(std::move(docs), content_hash(bytes));
}

std::uint64_t token_totals(const CorpusIndex& index, Decade decade,
                           std::optional<std::string_view> genre) {
  const auto& totals = index.slice_totals();
  if (genre) {
    const auto it = totals.find({decade, std::string(*genre)});
    return it == totals.end() ? 0 : it->second;
  }
  std::uint64_t sum = 0;
  for (auto it = totals.lower_bound({decade, std::string()});
       it != totals.end() && it->first.first == decade; ++it) {
    sum += it->second;
  }
  return sum;
}

GenreShareRow genre_shares(const CorpusIndex& index, Decade decade) {
  const auto total = token_totals(index, decade);
  if (total == 0) {
    throw Error(ErrorCode::kEmptyDecade,
                "decade " + std::to_string(decade.start_year()) + " has no tokens");
  }
  GenreShareRow row;
  const auto& totals = index.slice_totals();
  for (auto it = totals.lower_bound({decade, std::string()});
       it != totals.end() && it->first.first == decade; ++it) {
    row[it->first.second] = static_cast<double>(it->second) / static_cast<double>(total);
  }
  return row;
}

GenreShareTable genre_share_table(const CorpusIndex& index) {
  GenreShareTable table;
  for (const auto decade : index.decades()) {
    if (token_totals(index, decade) == 0) continue;
    table.emplace(decade, genre_shares(index, decade));
  }
  return table;
}

class IndexCacheAccess {
 public:
  static void save(const CorpusIndex& index, std::ostream& out) {
    cereal::PortableBinaryOutputArchive ar(out);
    ar(std::string(kCacheMagic), kCacheVersion, index.content_hash_);
    ar(*index.docs_, index.postings_, index.slice_totals_, index.decades_, index.genres_,
       index.total_tokens_);
  }

  static std::optional<CorpusIndex> load(std::istream& in, std::string_view expected_hash) {
    cereal::PortableBinaryInputArchive ar(in);
    std::string magic;
    std::uint32_t version = 0;
    std::string hash;
    ar(magic, version, hash);
    if (magic != kCacheMagic || version != kCacheVersion || hash != expected_hash) {
      return std::nullopt;
    }
    CorpusIndex index;
    std::vector<Document> docs;
    ar(docs, index.postings_, index.slice_totals_, index.decades_, index.genres_,
       index.total_tokens_);
    index.docs_ = std::make_shared<const std::vector<Document>>(std::move(docs));
    index.content_hash_ = std::move(hash);
    return index;
  }
};

void save_index_cache(const CorpusIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write index cache '" + path + "'");
  IndexCacheAccess::save(index, out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing index cache '" + path + "'");
}

std::optional<CorpusIndex> load_index_cache(const std::string& path,
                                            std::string_view expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return IndexCacheAccess::load(in, expected_hash);
  } catch (const cereal::Exception&) {
    return std::nullopt;
  }
}

}  // namespace obsolens
