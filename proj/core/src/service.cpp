#include "obsolens/service.hpp"

#include <charconv>

#include "httplib.h"
#include "json.hpp"
#include "obsolens/error.hpp"

namespace obsolens {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

json task_json(const AnnotationTask& t, const SessionStore& store) {
  json j = {{"sample_id", t.sample_id},
            {"decade", t.decade.start_year()},
            {"genre", t.genre},
            {"doc_id", t.doc_id},
            {"sentence", t.sentence},
            {"start", t.start},
            {"end", t.end},
            {"concordance", {{"left", t.left}, {"hit", t.hit}, {"right", t.right}}},
            {"status", std::string(to_string(store.status(t.sample_id)))}};
  if (const auto rec = store.current_label(t.sample_id)) {
    j["label"] = std::string(to_string(rec->label));
  } else {
    j["label"] = nullptr;
  }
  return j;
}

json estimate_json(const DecadeEstimate& e) {
  json j = {{"decade", e.decade.start_year()},
            {"tasks", e.tasks},
            {"pending", e.pending},
            {"k_purposive", e.purposive},
            {"non_purposive", e.non_purposive},
            {"unclear", e.unclear},
            {"sample_size", e.purposive + e.non_purposive},
            {"total_pmw", e.total_pmw}};
  if (e.estimate) {
    j["purposive_pmw"] = e.estimate->purposive_pmw;
    j["non_purposive_pmw"] = e.estimate->non_purposive_pmw;
  } else {
    j["purposive_pmw"] = nullptr;
    j["non_purposive_pmw"] = nullptr;
  }
  return j;
}

}  // namespace

AnnotationService::AnnotationService(SessionStore& store, std::optional<std::string> static_dir)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
  // httplib's default also sets SO_REUSEPORT, which lets a second server
  // share the port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                 sizeof(yes));
  });
  install_routes();
  if (static_dir) server_->set_mount_point("/", *static_dir);
}

AnnotationService::~AnnotationService() { stop(); }

void AnnotationService::install_routes() {
  auto& srv = *server_;

  srv.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
    const auto& h = store_.header();
    json decades = json::array();
    for (const auto& b : store_.baselines()) decades.push_back(b.decade.start_year());
    reply(res, 200,
          {{"session_id", h.session_id},
           {"patterns", h.patterns},
           {"seed", h.seed},
           {"index_hash", h.index_hash},
           {"created", h.created},
           {"decades", decades},
           {"task_count", store_.progress().total},
           {"unclear_policy", "unclear labels are excluded from k and n"}});
  });

  srv.Get("/api/tasks", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<TaskStatus> status;
    if (req.has_param("status")) {
      const auto s = req.get_param_value("status");
      if (s == "pending") {
        status = TaskStatus::kPending;
      } else if (s == "labeled") {
        status = TaskStatus::kLabeled;
      } else if (!s.empty()) {
        return fail(res, 400, "status must be pending or labeled");
      }
    }
    json arr = json::array();
    for (const auto& t : store_.tasks(status)) arr.push_back(task_json(t, store_));
    reply(res, 200, arr);
  });

  srv.Get("/api/tasks/:id", [this](const httplib::Request& req, httplib::Response& res) {
    const auto id = req.path_params.at("id");
    const auto t = store_.task(id);
    if (!t) return fail(res, 404, "no task '" + id + "'");
    reply(res, 200, task_json(*t, store_));
  });

  srv.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      return fail(res, 400, "body is not JSON");
    }
    if (!body.is_object() || !body.contains("sample_id") || !body["sample_id"].is_string() ||
        !body.contains("label") || !body["label"].is_string()) {
      return fail(res, 400, "expected {sample_id, label, annotator}");
    }
    AnnotationRecord rec;
    rec.sample_id = body["sample_id"].get<std::string>();
    try {
      rec.label = parse_label(body["label"].get<std::string>());
    } catch (const Error& e) {
      return fail(res, 400, e.what());
    }
    rec.annotator = body.contains("annotator") && body["annotator"].is_string()
                        ? body["annotator"].get<std::string>()
                        : "anonymous";
    rec.timestamp = utc_timestamp();
    try {
      const bool superseded = store_.annotate(rec);
      reply(res, 200,
            {{"sample_id", rec.sample_id},
             {"label", std::string(to_string(rec.label))},
             {"annotator", rec.annotator},
             {"timestamp", rec.timestamp},
             {"superseded", superseded}});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConflict) return fail(res, 409, e.what());
      return fail(res, 500, e.what());
    }
  });

  srv.Get("/api/estimate", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("decade")) {
      json arr = json::array();
      for (const auto& e : store_.estimates()) arr.push_back(estimate_json(e));
      return reply(res, 200, {{"estimates", arr}});
    }
    const auto text = req.get_param_value("decade");
    int year = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || year % 10 != 0) {
      return fail(res, 400, "decade must be a decade start year such as 1900");
    }
    const auto e = store_.estimate(Decade(year));
    if (!e) return fail(res, 404, "decade " + text + " is not part of this session");
    reply(res, 200, estimate_json(*e));
  });

  srv.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
    const auto p = store_.progress();
    reply(res, 200,
          {{"total", p.total},
           {"labeled", p.labeled},
           {"pending", p.pending},
           {"by_label",
            {{"purposive", p.purposive},
             {"non_purposive", p.non_purposive},
             {"unclear", p.unclear}}}});
  });
}

int AnnotationService::bind(int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ < 0) throw Error(ErrorCode::kPortInUse, "could not bind any loopback port");
  } else {
    if (!server_->bind_to_port("127.0.0.1", port)) {
      throw Error(ErrorCode::kPortInUse, "port " + std::to_string(port) + " is in use");
    }
    port_ = port;
  }
  return port_;
}

void AnnotationService::run() {
  if (port_ < 0) bind(0);
  server_->listen_after_bind();
}

void AnnotationService::start() {
  if (port_ < 0) bind(0);
  worker_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void AnnotationService::stop() {
  if (server_) server_->stop();
  if (worker_.joinable()) worker_.join();
}

}  // namespace obsolens
