#pragma once

// Loopback HTTP API over one annotation session.
//
//   GET  /api/session
//   GET  /api/tasks?status=pending|labeled
//   GET  /api/tasks/{id}
//   POST /api/annotations   {"sample_id", "label", "annotator"}
//   GET  /api/estimate[?decade=1900]
//   GET  /api/progress
//
// 400 malformed request or label, 404 unknown task or decade, 409 labeling a
// sample that is not part of the session.

#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "obsolens/session.hpp"

namespace httplib {
class Server;
}

namespace obsolens {

class AnnotationService {
 public:
  explicit AnnotationService(SessionStore& store,
                             std::optional<std::string> static_dir = std::nullopt);
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  // Binds 127.0.0.1. Port 0 picks a free port. Throws Error(kPortInUse).
  int bind(int port);
  int port() const noexcept { return port_; }

  // Blocks until stop() is called from another thread or a signal handler.
  void run();
  // run() on a background thread; returns once the server accepts requests.
  void start();
  void stop();

 private:
  void install_routes();

  SessionStore& store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread worker_;
  int port_ = -1;
};

}  // namespace obsolens
