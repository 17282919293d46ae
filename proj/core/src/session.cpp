#include "obsolens/session.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "obsolens/error.hpp"

namespace obsolens {

using nlohmann::json;

namespace {

void write_all(int fd, std::string_view data, const std::string& path) {
  while (!data.empty()) {
    const auto n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, "write to '" + path + "' failed: " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

json task_json(const AnnotationTask& t) {
  return {{"type", "task"},         {"sample_id", t.sample_id},
          {"decade", t.decade.start_year()},
          {"genre", t.genre},       {"doc_id", t.doc_id},
          {"sentence", t.sentence}, {"start", t.start},
          {"end", t.end},           {"left", t.left},
          {"hit", t.hit},           {"right", t.right}};
}

AnnotationTask task_from(const json& j) {
  AnnotationTask t;
  t.sample_id = j.at("sample_id").get<std::string>();
  t.decade = Decade(j.at("decade").get<int>());
  t.genre = j.at("genre").get<std::string>();
  t.doc_id = j.at("doc_id").get<std::string>();
  t.sentence = j.at("sentence").get<std::uint32_t>();
  t.start = j.at("start").get<std::uint32_t>();
  t.end = j.at("end").get<std::uint32_t>();
  t.left = j.at("left").get<std::string>();
  t.hit = j.at("hit").get<std::string>();
  t.right = j.at("right").get<std::string>();
  return t;
}

json record_json(const AnnotationRecord& r) {
  return {{"type", "annotation"},
          {"sample_id", r.sample_id},
          {"label", std::string(to_string(r.label))},
          {"annotator", r.annotator},
          {"timestamp", r.timestamp}};
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kPurposive: return "purposive";
    case Label::kNonPurposive: return "non_purposive";
    case Label::kUnclear: return "unclear";
  }
  return "";
}

Label parse_label(std::string_view text) {
  for (auto l : {Label::kPurposive, Label::kNonPurposive, Label::kUnclear}) {
    if (to_string(l) == text) return l;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown label '" + std::string(text) +
                                               "' (expected purposive, non_purposive, unclear)");
}

std::string_view to_string(TaskStatus status) {
  return status == TaskStatus::kPending ? "pending" : "labeled";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SessionStore::SessionStore(SessionStore&& other) noexcept
    : path_(std::move(other.path_)),
      header_(std::move(other.header_)),
      baselines_(std::move(other.baselines_)),
      tasks_(std::move(other.tasks_)),
      task_index_(std::move(other.task_index_)),
      current_(std::move(other.current_)),
      history_(std::move(other.history_)) {}

SessionStore SessionStore::create(const std::string& path, SessionHeader header,
                                  std::vector<DecadeBaseline> baselines,
                                  std::vector<AnnotationTask> tasks) {
  SessionStore store(path);
  std::string body;
  json head = {{"type", "session"},          {"session_id", header.session_id},
               {"patterns", header.patterns}, {"seed", header.seed},
               {"index_hash", header.index_hash}, {"created", header.created}};
  body += head.dump() + "\n";
  for (const auto& b : baselines) {
    json jb = {{"type", "baseline"},
               {"decade", b.decade.start_year()},
               {"total_pmw", b.total_pmw},
               {"match_count", b.match_count}};
    body += jb.dump() + "\n";
  }
  for (const auto& t : tasks) {
    if (!store.task_index_.emplace(t.sample_id, store.tasks_.size()).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate sample id '" + t.sample_id + "'");
    }
    store.tasks_.push_back(t);
    body += task_json(t).dump() + "\n";
  }

  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIo, "cannot create session '" + path + "': " + std::strerror(errno));
  }
  try {
    write_all(fd, body, path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
  store.header_ = std::move(header);
  store.baselines_ = std::move(baselines);
  return store;
}

SessionStore SessionStore::open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "session file '" + path + "' not found");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  SessionStore store(path);
  bool have_header = false;
  std::size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string_view line(content.data() + pos, (complete ? nl : content.size()) - pos);
    pos = complete ? nl + 1 : content.size();
    ++line_no;
    if (line.empty()) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      if (!complete) break;  // torn tail from an interrupted append
      throw Error(ErrorCode::kFormat,
                  "session '" + path + "' line " + std::to_string(line_no) + " is not JSON");
    }
    if (!complete && !j.is_object()) break;
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "session") {
        store.header_.session_id = j.at("session_id").get<std::string>();
        store.header_.patterns = j.at("patterns").get<std::vector<std::string>>();
        store.header_.seed = j.at("seed").get<std::uint64_t>();
        store.header_.index_hash = j.at("index_hash").get<std::string>();
        store.header_.created = j.at("created").get<std::string>();
        have_header = true;
      } else if (type == "baseline") {
        store.baselines_.push_back({Decade(j.at("decade").get<int>()),
                                    j.at("total_pmw").get<double>(),
                                    j.at("match_count").get<std::uint64_t>()});
      } else if (type == "task") {
        auto t = task_from(j);
        store.task_index_.emplace(t.sample_id, store.tasks_.size());
        store.tasks_.push_back(std::move(t));
      } else if (type == "annotation") {
        store.apply_annotation({j.at("sample_id").get<std::string>(),
                                parse_label(j.at("label").get<std::string>()),
                                j.at("annotator").get<std::string>(),
                                j.at("timestamp").get<std::string>()});
      } else {
        throw Error(ErrorCode::kFormat, "unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat, "session '" + path + "' line " + std::to_string(line_no) +
                                          ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kFormat, "session '" + path + "' has no header");
  return store;
}

void SessionStore::apply_annotation(AnnotationRecord record) {
  history_.push_back(record);
  current_[record.sample_id] = std::move(record);
}

void SessionStore::append_line(const std::string& line) {
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND);
  if (fd < 0) {
    throw Error(ErrorCode::kIo, "cannot open session '" + path_ + "': " + std::strerror(errno));
  }
  try {
    write_all(fd, line, path_);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
}

std::vector<DecadeBaseline> SessionStore::baselines() const {
  std::shared_lock lock(mutex_);
  return baselines_;
}

std::vector<AnnotationTask> SessionStore::tasks(std::optional<TaskStatus> status) const {
  std::shared_lock lock(mutex_);
  std::vector<AnnotationTask> out;
  for (const auto& t : tasks_) {
    const bool labeled = current_.find(t.sample_id) != current_.end();
    if (!status || (*status == TaskStatus::kLabeled) == labeled) out.push_back(t);
  }
  return out;
}

std::optional<AnnotationTask> SessionStore::task(std::string_view sample_id) const {
  std::shared_lock lock(mutex_);
  const auto it = task_index_.find(sample_id);
  if (it == task_index_.end()) return std::nullopt;
  return tasks_[it->second];
}

TaskStatus SessionStore::status(std::string_view sample_id) const {
  std::shared_lock lock(mutex_);
  return current_.find(sample_id) != current_.end() ? TaskStatus::kLabeled : TaskStatus::kPending;
}

std::optional<AnnotationRecord> SessionStore::current_label(std::string_view sample_id) const {
  std::shared_lock lock(mutex_);
  const auto it = current_.find(sample_id);
  if (it == current_.end()) return std::nullopt;
  return it->second;
}

std::vector<AnnotationRecord> SessionStore::history() const {
  std::shared_lock lock(mutex_);
  return history_;
}

bool SessionStore::annotate(const AnnotationRecord& input) {
  AnnotationRecord record = input;
  if (record.timestamp.empty()) record.timestamp = utc_timestamp();
  std::unique_lock lock(mutex_);
  if (task_index_.find(record.sample_id) == task_index_.end()) {
    throw Error(ErrorCode::kConflict,
                "sample '" + record.sample_id + "' is not part of session " + header_.session_id);
  }
  // Commit to disk before the in-memory state changes.
  append_line(record_json(record).dump() + "\n");
  const bool superseded = current_.find(record.sample_id) != current_.end();
  apply_annotation(record);
  return superseded;
}

DecadeEstimate SessionStore::estimate_locked(const DecadeBaseline& baseline) const {
  DecadeEstimate e;
  e.decade = baseline.decade;
  e.total_pmw = baseline.total_pmw;
  for (const auto& t : tasks_) {
    if (t.decade != baseline.decade) continue;
    ++e.tasks;
    const auto it = current_.find(t.sample_id);
    if (it == current_.end()) {
      ++e.pending;
      continue;
    }
    switch (it->second.label) {
      case Label::kPurposive: ++e.purposive; break;
      case Label::kNonPurposive: ++e.non_purposive; break;
      case Label::kUnclear: ++e.unclear; break;
    }
  }
  const int n = e.purposive + e.non_purposive;
  if (n > 0) e.estimate = estimate_purposive(e.decade, e.total_pmw, e.purposive, n);
  return e;
}

std::optional<DecadeEstimate> SessionStore::estimate(Decade decade) const {
  std::shared_lock lock(mutex_);
  for (const auto& b : baselines_) {
    if (b.decade == decade) return estimate_locked(b);
  }
  return std::nullopt;
}

std::vector<DecadeEstimate> SessionStore::estimates() const {
  std::shared_lock lock(mutex_);
  std::vector<DecadeEstimate> out;
  for (const auto& b : baselines_) out.push_back(estimate_locked(b));
  return out;
}

Progress SessionStore::progress() const {
  std::shared_lock lock(mutex_);
  Progress p;
  p.total = static_cast<int>(tasks_.size());
  for (const auto& t : tasks_) {
    const auto it = current_.find(t.sample_id);
    if (it == current_.end()) {
      ++p.pending;
      continue;
    }
    ++p.labeled;
    switch (it->second.label) {
      case Label::kPurposive: ++p.purposive; break;
      case Label::kNonPurposive: ++p.non_purposive; break;
      case Label::kUnclear: ++p.unclear; break;
    }
  }
  return p;
}

}  // namespace obsolens
