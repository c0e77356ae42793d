#include "getin/getin.h"

#include "getin/engine.hpp"
#include "getin/error.hpp"
#include "getin/service.hpp"
#include "getin/survey.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>

struct getin_game {
    std::shared_ptr<const getin::Engine> engine;
};

struct getin_session {
    std::shared_ptr<const getin::Engine> engine;
    getin::SessionState state;
};

struct getin_service {
    std::unique_ptr<getin::GameService> service;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& text) {
    auto* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out) std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

getin_status status_of(getin::ErrorCode code) { return static_cast<getin_status>(static_cast<int>(code) + 1); }

template <typename F>
getin_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return GETIN_OK;
    } catch (const getin::Error& e) {
        last_error = e.what();
        for (const auto& d : e.details()) last_error += "\n  " + d;
        return status_of(e.code());
    } catch (const std::exception& e) {
        last_error = e.what();
        return GETIN_INTERNAL;
    }
}

void require(bool condition, const char* what) {
    if (!condition) throw getin::Error(getin::ErrorCode::InvalidArgument, what);
}

std::vector<std::string> paths(const char* const* items, size_t count) {
    std::vector<std::string> out;
    for (size_t i = 0; i < count; ++i) {
        require(items[i] != nullptr, "null scenario path");
        out.emplace_back(items[i]);
    }
    return out;
}

}  // namespace

extern "C" {

const char* getin_last_error(void) { return last_error.c_str(); }

const char* getin_status_name(getin_status status) {
    if (status == GETIN_OK) return "Ok";
    if (status == GETIN_INTERNAL) return "Internal";
    const int code = static_cast<int>(status) - 1;
    if (code < 0 || code > static_cast<int>(getin::ErrorCode::IoError)) return "Unknown";
    static thread_local std::string name;
    name = std::string(getin::to_string(static_cast<getin::ErrorCode>(code)));
    return name.c_str();
}

void getin_string_free(char* text) { std::free(text); }

getin_status getin_game_load(const char* world_path, const char* scenario_dir, getin_game** out) {
    return guarded([&] {
        require(world_path && scenario_dir && out, "null argument");
        auto engine = std::make_shared<const getin::Engine>(getin::load_content(world_path, std::string(scenario_dir)));
        *out = new getin_game{std::move(engine)};
    });
}

getin_status getin_game_load_files(const char* world_path, const char* const* scenario_paths, size_t count,
                                   getin_game** out) {
    return guarded([&] {
        require(world_path && out && (scenario_paths || count == 0), "null argument");
        auto engine = std::make_shared<const getin::Engine>(
            getin::load_content(world_path, paths(scenario_paths, count)));
        *out = new getin_game{std::move(engine)};
    });
}

void getin_game_free(getin_game* game) { delete game; }

getin_status getin_validate(const char* world_path, const char* const* scenario_paths, size_t count,
                            char** report_json) {
    bool defects = false;
    const auto status = guarded([&] {
        require(report_json && (scenario_paths || count == 0), "null argument");
        std::optional<std::string> world;
        if (world_path) world = world_path;
        const auto report = getin::validate_content(paths(scenario_paths, count), world);
        defects = !report.defects.empty();
        *report_json = dup(getin::dump_json(getin::to_json(report)));
    });
    if (status == GETIN_OK && defects) {
        last_error = "content has defects";
        return GETIN_VALIDATION_ERROR;
    }
    return status;
}

getin_status getin_session_new(const getin_game* game, getin_session** out) {
    return guarded([&] {
        require(game && out, "null argument");
        *out = new getin_session{game->engine, game->engine->new_session()};
    });
}

void getin_session_free(getin_session* session) { delete session; }

getin_status getin_session_start(getin_session* session, const char* scenario_id, int abandon, char** view_json) {
    return guarded([&] {
        require(session && scenario_id, "null argument");
        const auto view = session->engine->start_scenario(session->state, scenario_id, abandon != 0);
        if (view_json) *view_json = dup(getin::dump_json(getin::to_json(view)));
    });
}

getin_status getin_session_abandon(getin_session* session) {
    return guarded([&] {
        require(session, "null argument");
        session->engine->abandon(session->state);
    });
}

getin_status getin_session_input(getin_session* session, const char* kind, const char* value, char** result_json) {
    return guarded([&] {
        require(session && kind && value, "null argument");
        const auto k = getin::input_kind_from_string(kind);
        require(k.has_value(), "kind must be choice, text or command");
        const auto result = session->engine->submit_input(session->state, {*k, value});
        if (result_json) *result_json = dup(getin::dump_json(getin::to_json(result)));
    });
}

getin_status getin_session_view(const getin_session* session, char** state_json) {
    return guarded([&] {
        require(session && state_json, "null argument");
        *state_json = dup(getin::dump_json(session->engine->session_json(session->state)));
    });
}

getin_status getin_session_log(const getin_session* session, char** canonical_log) {
    return guarded([&] {
        require(session && canonical_log, "null argument");
        *canonical_log = dup(getin::canonical_log(session->state.event_log));
    });
}

getin_status getin_simulate(const getin_game* game, const char* script, char** transcript, int* reached_terminal) {
    return guarded([&] {
        require(game && script && transcript, "null argument");
        const auto run = getin::run_script(*game->engine, script);
        *transcript = dup(run.transcript);
        if (reached_terminal) *reached_terminal = run.reached_terminal ? 1 : 0;
    });
}

getin_status getin_survey_report(const char* store_path, const char* form, const char* mode, char** csv) {
    return guarded([&] {
        require(store_path && form && mode && csv, "null argument");
        const auto f = getin::form_from_string(form);
        if (!f) throw getin::Error(getin::ErrorCode::UnknownForm, std::string("no survey form '") + form + "'");
        if (!std::filesystem::exists(store_path)) {
            throw getin::Error(getin::ErrorCode::IoError, std::string("no response store at ") + store_path);
        }
        const getin::SurveyStore store{std::string(store_path)};
        const auto pre = store.responses(getin::FormId::Pre);
        const auto post = store.responses(getin::FormId::Post);
        const auto& mine = *f == getin::FormId::Pre ? pre : post;
        const std::string m = mode;
        if (m == "aggregate") {
            *csv = dup(getin::aggregate_csv(getin::aggregate(getin::survey_form(*f), mine, &pre)));
        } else if (m == "paired") {
            *csv = dup(getin::paired_csv(getin::paired(pre, post)));
        } else if (m == "responses") {
            *csv = dup(getin::responses_csv(getin::survey_form(*f), mine));
        } else {
            throw getin::Error(getin::ErrorCode::InvalidArgument, "mode must be aggregate, paired or responses");
        }
    });
}

getin_status getin_service_new(const char* config_json, getin_service** out) {
    return guarded([&] {
        require(config_json && out, "null argument");
        getin::json j;
        try {
            j = getin::json::parse(config_json);
        } catch (const getin::json::parse_error&) {
            throw getin::Error(getin::ErrorCode::InvalidArgument, "service config is not valid JSON");
        }
        getin::ServiceConfig c;
        try {
            getin::check_keys(j, {"world", "scenarios", "storage", "web", "unlinked"}, "service config", true);
            c.world_path = j.value("world", "");
            c.scenario_dir = j.value("scenarios", "");
            c.storage_dir = j.value("storage", "");
            c.web_dir = j.value("web", "");
            c.unlinked_surveys = j.value("unlinked", false);
        } catch (const std::exception& e) {
            throw getin::Error(getin::ErrorCode::InvalidArgument, std::string("bad service config: ") + e.what());
        }
        *out = new getin_service{std::make_unique<getin::GameService>(std::move(c))};
    });
}

void getin_service_free(getin_service* service) { delete service; }

getin_status getin_service_handle(getin_service* service, const char* method, const char* target, const char* body,
                                  int* http_status, char** response_body) {
    return guarded([&] {
        require(service && method && target && http_status && response_body, "null argument");
        const auto r = service->service->handle(method, target, body ? body : "");
        *http_status = r.status;
        *response_body = dup(r.body);
    });
}

getin_status getin_service_listen(getin_service* service, const char* host, int port) {
    return guarded([&] {
        require(service && host, "null argument");
        if (!service->service->listen(host, port)) {
            throw getin::Error(getin::ErrorCode::IoError,
                               "cannot listen on " + std::string(host) + ":" + std::to_string(port));
        }
    });
}

void getin_service_stop(getin_service* service) {
    if (service) service->service->stop();
}

char* getin_service_content_error(const getin_service* service) {
    if (!service || !service->service->content_error()) return nullptr;
    return dup(*service->service->content_error());
}

}  // extern "C"
