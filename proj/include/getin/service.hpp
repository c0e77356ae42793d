#pragma once

#include "getin/engine.hpp"
#include "getin/error.hpp"
#include "getin/survey.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace getin {

struct ServiceConfig {
    std::string world_path;
    std::string scenario_dir;
    std::string storage_dir;  // empty: keep everything in memory
    std::string web_dir;      // optional static client bundle
    bool unlinked_surveys = false;
};

// Reads GETIN_WORLD, GETIN_SCENARIOS, GETIN_STORAGE and GETIN_WEB on top of
// the given defaults.
ServiceConfig config_from_env(ServiceConfig defaults);

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON
};

int http_status(ErrorCode code);
json error_json(const Error& e);

struct QuarantinedLog {
    std::string file;
    std::string diagnostic;
};

// The request router and the session store. Transport-independent: the
// HTTP binding and the in-process C API both call handle().
class GameService {
public:
    // Content problems do not throw here; they surface as 500 responses from
    // the endpoints that need content.
    explicit GameService(ServiceConfig config);
    ~GameService();

    GameService(const GameService&) = delete;
    GameService& operator=(const GameService&) = delete;

    HttpResponse handle(const std::string& method, const std::string& target, const std::string& body);

    [[nodiscard]] std::size_t session_count() const;
    [[nodiscard]] std::vector<QuarantinedLog> quarantined() const;
    [[nodiscard]] const std::optional<std::string>& content_error() const { return content_error_; }
    // Throws Error(UnknownSession).
    [[nodiscard]] std::string survey_token(const std::string& session_id) const;

    // Blocks serving HTTP until stop(). Returns false if the socket could not
    // be bound.
    bool listen(const std::string& host, int port);
    void stop();

    // Test hook: runs while an input request holds its session's lock.
    std::function<void(const std::string& session_id)> on_input_locked;

private:
    struct Slot {
        std::mutex mutex;
        SessionState state;
        std::size_t persisted = 0;  // events already on disk
    };

    HttpResponse create_session();
    HttpResponse get_session(const std::string& id);
    HttpResponse post_input(const std::string& id, const std::string& body);
    HttpResponse start(const std::string& id, const std::string& scenario, const std::string& body);
    HttpResponse scenarios() const;
    HttpResponse survey_form_response(const std::string& form) const;
    HttpResponse survey_submit(const std::string& form, const std::string& body);
    HttpResponse report(const std::string& form) const;

    [[nodiscard]] std::shared_ptr<Slot> find(const std::string& id) const;
    const Engine& engine() const;
    void persist(const std::string& id, Slot& slot);
    void recover();

    ServiceConfig config_;
    std::unique_ptr<Engine> engine_;
    std::optional<std::string> content_error_;
    std::unique_ptr<SurveyStore> surveys_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    mutable std::mutex quarantine_mutex_;
    std::vector<QuarantinedLog> quarantined_;

    struct Http;
    std::unique_ptr<Http> http_;
};

}  // namespace getin
