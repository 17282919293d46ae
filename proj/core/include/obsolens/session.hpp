#pragma once

// Annotation sessions: sampled concordance lines awaiting a purposive /
// non-purposive judgement, persisted as an append-only JSON-lines file.
//
// Record kinds, one JSON object per line, discriminated by "type":
//   session   header (id, patterns, seed, index hash, creation time); first line
//   baseline  per-decade total pmw of the sampled pattern(s)
//   task      one sampled concordance line
//   annotation  a label; later lines for the same sample_id supersede earlier ones

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "obsolens/corpus.hpp"
#include "obsolens/stats.hpp"

namespace obsolens {

enum class Label { kPurposive, kNonPurposive, kUnclear };
std::string_view to_string(Label label);
// Throws Error(kInvalidArgument) for anything but the three label names.
Label parse_label(std::string_view text);

enum class TaskStatus { kPending, kLabeled };
std::string_view to_string(TaskStatus status);

struct AnnotationTask {
  std::string sample_id;
  Decade decade;
  std::string genre;
  std::string doc_id;
  std::uint32_t sentence = 0;
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  std::string left;
  std::string hit;
  std::string right;
};

struct AnnotationRecord {
  std::string sample_id;
  Label label = Label::kUnclear;
  std::string annotator;
  std::string timestamp;
};

struct DecadeBaseline {
  Decade decade;
  double total_pmw = 0.0;
  std::uint64_t match_count = 0;
};

struct SessionHeader {
  std::string session_id;
  std::vector<std::string> patterns;
  std::uint64_t seed = 0;
  std::string index_hash;
  std::string created;
};

struct DecadeEstimate {
  Decade decade;
  int tasks = 0;
  int purposive = 0;
  int non_purposive = 0;
  int unclear = 0;
  int pending = 0;
  double total_pmw = 0.0;
  // Present once at least one purposive/non-purposive label exists; unclear
  // labels count toward neither k nor n.
  std::optional<PurposiveEstimate> estimate;
};

struct Progress {
  int total = 0;
  int labeled = 0;
  int pending = 0;
  int purposive = 0;
  int non_purposive = 0;
  int unclear = 0;
};

std::string utc_timestamp();

// Thread-safe: writes are serialized, reads run concurrently against the last
// committed state.
class SessionStore {
 public:
  // Fails with Error(kIo) if the file already exists.
  static SessionStore create(const std::string& path, SessionHeader header,
                             std::vector<DecadeBaseline> baselines,
                             std::vector<AnnotationTask> tasks);
  // Replays the log. A torn final line (crash mid-append) is ignored.
  static SessionStore open(const std::string& path);

  SessionStore(SessionStore&& other) noexcept;
  SessionStore& operator=(SessionStore&&) = delete;

  const std::string& path() const noexcept { return path_; }
  const SessionHeader& header() const noexcept { return header_; }
  std::vector<DecadeBaseline> baselines() const;

  std::vector<AnnotationTask> tasks(std::optional<TaskStatus> status = std::nullopt) const;
  std::optional<AnnotationTask> task(std::string_view sample_id) const;
  TaskStatus status(std::string_view sample_id) const;
  std::optional<AnnotationRecord> current_label(std::string_view sample_id) const;
  // Every annotation line in log order, superseded ones included.
  std::vector<AnnotationRecord> history() const;

  // Throws Error(kConflict) when sample_id is not a task of this session.
  // Returns true when an earlier label was superseded.
  bool annotate(const AnnotationRecord& record);

  std::optional<DecadeEstimate> estimate(Decade decade) const;
  std::vector<DecadeEstimate> estimates() const;
  Progress progress() const;

 private:
  explicit SessionStore(std::string path) : path_(std::move(path)) {}
  void append_line(const std::string& line);
  void apply_annotation(AnnotationRecord record);
  DecadeEstimate estimate_locked(const DecadeBaseline& baseline) const;

  std::string path_;
  SessionHeader header_;
  std::vector<DecadeBaseline> baselines_;
  std::vector<AnnotationTask> tasks_;
  std::map<std::string, std::size_t, std::less<>> task_index_;
  std::map<std::string, AnnotationRecord, std::less<>> current_;
  std::vector<AnnotationRecord> history_;
  mutable std::shared_mutex mutex_;
};

}  // namespace obsolens
