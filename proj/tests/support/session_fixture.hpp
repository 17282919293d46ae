#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "obsolens/index.hpp"
#include "obsolens/query.hpp"
#include "obsolens/session.hpp"
#include "support/oracles.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("obsolens_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// 100 tasks drawn from the fixture's 1900 "the" hits, with the Table 2
// 1900 total as the decade baseline.
inline obsolens::SessionStore make_session(const std::string& path, std::size_t n = 100) {
  using namespace obsolens;
  const auto idx = index_corpus_file(oracle::fixture("corpus.vrt"));
  MatchSet pop;
  for (const auto& m : match_pattern(idx, parse_pattern("the"))) {
    if (m.decade == Decade(1900)) pop.push_back(m);
  }
  const auto drawn = draw_sample(std::span<const Match>(pop), n, 20210419, "d1900-");
  std::vector<AnnotationTask> tasks;
  for (const auto& s : drawn) {
    const auto line = kwic(idx, s.item, 5);
    tasks.push_back({s.sample_id, s.item.decade, s.item.genre, s.item.doc_id, s.item.sentence,
                     s.item.start, s.item.end, line.left, line.hit, line.right});
  }
  SessionHeader h{"s-test", {"the"}, 20210419, idx.content_hash(), "2021-04-19T00:00:00Z"};
  return SessionStore::create(path, h, {{Decade(1900), 60.32, pop.size()}}, tasks);
}

}  // namespace testing
