#include "getin/service.hpp"

#include "getin/error.hpp"

#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace getin {

namespace fs = std::filesystem;

namespace {

HttpResponse ok(int status, const json& body) { return {status, dump_json(body)}; }

HttpResponse fail(const Error& e) { return {http_status(e.code()), dump_json(error_json(e))}; }

HttpResponse fail(ErrorCode code, std::string message) { return fail(Error(code, std::move(message))); }

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos < path.size()) {
        auto end = path.find('/', pos);
        if (end == std::string_view::npos) end = path.size();
        if (end > pos) parts.emplace_back(path.substr(pos, end - pos));
        pos = end + 1;
    }
    return parts;
}

json parse_body(const std::string& body) {
    if (trim(body).empty()) return json::object();
    try {
        auto j = json::parse(body);
        if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error&) {
        throw Error(ErrorCode::InvalidArgument, "request body is not valid JSON");
    }
}

// Unknown keys in a request are the client's fault, not a content defect.
void check_body_keys(const json& j, std::initializer_list<std::string_view> keys, const std::string& what) {
    try {
        check_keys(j, keys, what, true);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, e.what(), e.details());
    }
}

bool is_session_id(std::string_view id) {
    return id.size() == 32 && std::all_of(id.begin(), id.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

}  // namespace

ServiceConfig config_from_env(ServiceConfig c) {
    if (const char* v = std::getenv("GETIN_WORLD")) c.world_path = v;
    if (const char* v = std::getenv("GETIN_SCENARIOS")) c.scenario_dir = v;
    if (const char* v = std::getenv("GETIN_STORAGE")) c.storage_dir = v;
    if (const char* v = std::getenv("GETIN_WEB")) c.web_dir = v;
    return c;
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownScenario:
        case ErrorCode::UnknownForm: return 404;
        case ErrorCode::Conflict:
        case ErrorCode::ScenarioInProgress:
        case ErrorCode::NoActiveScenario:
        case ErrorCode::SessionTerminated: return 409;
        case ErrorCode::ValidationFailed: return 422;
        case ErrorCode::WorldLoadError:
        case ErrorCode::CorruptLog:
        case ErrorCode::IoError:
        case ErrorCode::ValidationError:
        case ErrorCode::ParseError: return 500;
        default: return 400;
    }
}

json error_json(const Error& e) {
    return {{"error", to_string(e.code())}, {"message", e.what()}, {"details", e.details()}};
}

struct GameService::Http {
    httplib::Server server;
};

GameService::GameService(ServiceConfig config) : config_(std::move(config)) {
    try {
        engine_ = std::make_unique<Engine>(load_content(config_.world_path, config_.scenario_dir));
    } catch (const Error& e) {
        content_error_ = std::string(e.what());
        for (const auto& d : e.details()) *content_error_ += "\n  " + d;
    }
    std::optional<std::string> responses;
    if (!config_.storage_dir.empty()) {
        std::error_code ec;
        fs::create_directories(fs::path(config_.storage_dir) / "sessions", ec);
        responses = (fs::path(config_.storage_dir) / "responses.jsonl").string();
    }
    surveys_ = std::make_unique<SurveyStore>(responses, config_.unlinked_surveys);
    if (engine_) recover();
}

GameService::~GameService() { stop(); }

const Engine& GameService::engine() const {
    if (!engine_) {
        throw Error(ErrorCode::WorldLoadError, content_error_.value_or("content not loaded"));
    }
    return *engine_;
}

std::size_t GameService::session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
}

std::vector<QuarantinedLog> GameService::quarantined() const {
    std::lock_guard lock(quarantine_mutex_);
    return quarantined_;
}

std::shared_ptr<GameService::Slot> GameService::find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session " + id);
    return it->second;
}

std::string GameService::survey_token(const std::string& session_id) const {
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    return slot->state.survey_token;
}

// ---------------------------------------------------------------------------
// Persistence: sessions/<id>.jsonl holds a header line and then one event per
// line, appended as they happen.
// ---------------------------------------------------------------------------

void GameService::persist(const std::string& id, Slot& slot) {
    if (config_.storage_dir.empty()) {
        slot.persisted = slot.state.event_log.size();
        return;
    }
    const auto path = fs::path(config_.storage_dir) / "sessions" / (id + ".jsonl");
    std::string text;
    if (slot.persisted == 0 && !fs::exists(path)) {
        text += dump_json({{"session_id", slot.state.session_id},
                           {"survey_token", slot.state.survey_token},
                           {"created_at", now_iso8601()}}) +
                "\n";
    }
    for (std::size_t i = slot.persisted; i < slot.state.event_log.size(); ++i) {
        text += dump_json(to_json(slot.state.event_log[i])) + "\n";
    }
    if (text.empty()) return;
    std::ofstream out(path, std::ios::app | std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    slot.persisted = slot.state.event_log.size();
}

void GameService::recover() {
    if (config_.storage_dir.empty()) return;
    const auto dir = fs::path(config_.storage_dir) / "sessions";
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        try {
            std::ifstream in(file, std::ios::binary);
            std::string line;
            if (!std::getline(in, line)) throw Error(ErrorCode::CorruptLog, "empty session file");
            json header;
            try {
                header = json::parse(line);
            } catch (const json::parse_error&) {
                throw Error(ErrorCode::CorruptLog, "unreadable header");
            }
            std::vector<Event> log;
            std::size_t index = 0;
            while (std::getline(in, line)) {
                try {
                    log.push_back(event_from_json(json::parse(line)));
                } catch (const json::parse_error&) {
                    throw Error(ErrorCode::CorruptLog, "event " + std::to_string(index) + ": unreadable line",
                                {std::to_string(index)});
                } catch (const Error& e) {
                    throw Error(ErrorCode::CorruptLog, "event " + std::to_string(index) + ": " + e.what(),
                                {std::to_string(index)});
                }
                ++index;
            }
            auto state = engine_->rebuild(log);
            state.session_id = header.at("session_id").get<std::string>();
            state.survey_token = header.at("survey_token").get<std::string>();
            if (state.session_id + ".jsonl" != file.filename().string()) {
                throw Error(ErrorCode::CorruptLog, "header names a different session");
            }
            auto slot = std::make_shared<Slot>();
            slot->state = std::move(state);
            slot->persisted = slot->state.event_log.size();
            sessions_[slot->state.session_id] = std::move(slot);
        } catch (const std::exception& e) {
            const auto qdir = fs::path(config_.storage_dir) / "quarantine";
            fs::create_directories(qdir, ec);
            fs::rename(file, qdir / file.filename(), ec);
            std::ofstream(qdir / (file.filename().string() + ".reason")) << e.what() << "\n";
            std::lock_guard lock(quarantine_mutex_);
            quarantined_.push_back({file.filename().string(), e.what()});
        }
    }
}

// ---------------------------------------------------------------------------
// Endpoints
// ---------------------------------------------------------------------------

HttpResponse GameService::create_session() {
    auto slot = std::make_shared<Slot>();
    slot->state = engine().new_session();
    const std::string id = slot->state.session_id;
    {
        std::lock_guard lock(slot->mutex);
        persist(id, *slot);
    }
    {
        std::unique_lock lock(sessions_mutex_);
        sessions_[id] = slot;
    }
    return ok(201, {{"session_id", id}, {"survey_token", slot->state.survey_token}});
}

HttpResponse GameService::get_session(const std::string& id) {
    auto slot = find(id);
    std::unique_lock lock(slot->mutex, std::try_to_lock);
    if (!lock.owns_lock()) lock.lock();  // reads wait rather than conflict
    return ok(200, engine().session_json(slot->state));
}

HttpResponse GameService::post_input(const std::string& id, const std::string& body) {
    auto slot = find(id);
    std::unique_lock lock(slot->mutex, std::try_to_lock);
    if (!lock.owns_lock()) {
        return fail(ErrorCode::Conflict, "another input for this session is still being processed");
    }
    if (on_input_locked) on_input_locked(id);

    const auto j = parse_body(body);
    check_body_keys(j, {"kind", "value"}, "input");
    if (!j.contains("kind") || !j["kind"].is_string()) {
        return fail(ErrorCode::InvalidArgument, "'kind' must be one of choice, text, command");
    }
    const auto kind = input_kind_from_string(j["kind"].get<std::string>());
    if (!kind) return fail(ErrorCode::InvalidArgument, "'kind' must be one of choice, text, command");
    std::string value;
    if (j.contains("value")) {
        if (j["value"].is_string()) {
            value = j["value"].get<std::string>();
        } else if (j["value"].is_number_integer()) {
            value = std::to_string(j["value"].get<long long>());
        } else {
            return fail(ErrorCode::InvalidArgument, "'value' must be a string or an integer");
        }
    }
    const auto result = engine().submit_input(slot->state, {*kind, value});
    persist(id, *slot);
    return ok(200, to_json(result));
}

HttpResponse GameService::start(const std::string& id, const std::string& scenario, const std::string& body) {
    auto slot = find(id);
    std::unique_lock lock(slot->mutex, std::try_to_lock);
    if (!lock.owns_lock()) {
        return fail(ErrorCode::Conflict, "another input for this session is still being processed");
    }
    const auto j = parse_body(body);
    check_body_keys(j, {"abandon"}, "start");
    const bool abandon = j.contains("abandon") && j["abandon"].is_boolean() && j["abandon"].get<bool>();
    const auto view = engine().start_scenario(slot->state, scenario, abandon);
    persist(id, *slot);
    return ok(200, {{"view", to_json(view)}});
}

HttpResponse GameService::scenarios() const { return ok(200, {{"scenarios", engine().menu_json(SessionState{})}}); }

HttpResponse GameService::survey_form_response(const std::string& form) const {
    const auto f = form_from_string(form);
    if (!f) return fail(ErrorCode::UnknownForm, "no survey form '" + form + "'");
    return ok(200, to_json(survey_form(*f)));
}

HttpResponse GameService::survey_submit(const std::string& form, const std::string& body) {
    const auto f = form_from_string(form);
    if (!f) return fail(ErrorCode::UnknownForm, "no survey form '" + form + "'");
    const auto j = parse_body(body);
    check_body_keys(j, {"token", "answers"}, "response");
    std::optional<std::string> token;
    if (j.contains("token") && !j["token"].is_null()) {
        if (!j["token"].is_string()) throw Error(ErrorCode::ValidationFailed, "token must be a string", {"token"});
        token = j["token"].get<std::string>();
    }
    const auto receipt = surveys_->submit(*f, token, j.contains("answers") ? j["answers"] : json::object());
    if (receipt.replaced) std::clog << "survey: replaced earlier " << to_string(*f) << " response\n";
    return ok(201, to_json(receipt));
}

HttpResponse GameService::report(const std::string& form) const {
    const auto f = form_from_string(form);
    if (!f) return fail(ErrorCode::UnknownForm, "no survey form '" + form + "'");
    const auto pre = surveys_->responses(FormId::Pre);
    if (*f == FormId::Pre) return ok(200, to_json(aggregate(survey_form(FormId::Pre), pre)));
    const auto post = surveys_->responses(FormId::Post);
    auto j = to_json(aggregate(survey_form(FormId::Post), post, &pre));
    j["paired"] = to_json(paired(pre, post));
    return ok(200, j);
}

HttpResponse GameService::handle(const std::string& method, const std::string& target, const std::string& body) {
    const auto path = target.substr(0, target.find('?'));
    const auto p = split_path(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    try {
        if (p.size() == 1 && p[0] == "sessions") {
            if (post) return create_session();
        } else if (p.size() == 2 && p[0] == "sessions") {
            if (!is_session_id(p[1])) throw Error(ErrorCode::UnknownSession, "no session " + p[1]);
            if (get) return get_session(p[1]);
        } else if (p.size() == 3 && p[0] == "sessions" && p[2] == "input") {
            if (!is_session_id(p[1])) throw Error(ErrorCode::UnknownSession, "no session " + p[1]);
            if (post) return post_input(p[1], body);
        } else if (p.size() == 5 && p[0] == "sessions" && p[2] == "scenario" && p[4] == "start") {
            if (!is_session_id(p[1])) throw Error(ErrorCode::UnknownSession, "no session " + p[1]);
            if (post) return start(p[1], p[3], body);
        } else if (p.size() == 1 && p[0] == "scenarios") {
            if (get) return scenarios();
        } else if (p.size() == 2 && p[0] == "surveys") {
            if (get) return survey_form_response(p[1]);
        } else if (p.size() == 3 && p[0] == "surveys" && p[2] == "responses") {
            if (post) return survey_submit(p[1], body);
        } else if (p.size() == 2 && p[0] == "reports") {
            if (get) return report(p[1]);
        } else if (p.size() == 1 && p[0] == "grammar") {
            if (get) return ok(200, grammar_json());
        } else {
            return {404, dump_json({{"error", "NotFound"}, {"message", "no route " + path}, {"details", json::array()}})};
        }
        return {405, dump_json({{"error", "MethodNotAllowed"},
                                {"message", method + " is not allowed on " + path},
                                {"details", json::array()}})};
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        return {500, dump_json({{"error", "Internal"}, {"message", e.what()}, {"details", json::array()}})};
    }
}

// ---------------------------------------------------------------------------
// HTTP binding
// ---------------------------------------------------------------------------

bool GameService::listen(const std::string& host, int port) {
    http_ = std::make_unique<Http>();
    auto& srv = http_->server;
    if (!config_.web_dir.empty()) srv.set_mount_point("/app", config_.web_dir);
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
        const auto r = handle(req.method, req.target, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    srv.Get(R"(/(sessions|scenarios|surveys|reports|grammar).*)", route);
    srv.Post(R"(/(sessions|surveys).*)", route);
    return srv.listen(host, port);
}

void GameService::stop() {
    if (http_) http_->server.stop();
}

}  // namespace getin
