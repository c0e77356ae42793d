// Command-line front end. Talks to the game only through the C interface.
#include "getin/getin.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContent = 1;
constexpr int kExitUsage = 2;

#ifndef GETIN_CONTENT_DIR
#define GETIN_CONTENT_DIR "content"
#endif

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

const std::string kDefaultWorld = std::string(GETIN_CONTENT_DIR) + "/world.json";
const std::string kDefaultScenarios = std::string(GETIN_CONTENT_DIR) + "/scenarios";

// Owns a string handed out by the library.
struct Owned {
    char* p = nullptr;
    ~Owned() { getin_string_free(p); }
    [[nodiscard]] std::string str() const { return p ? std::string(p) : std::string(); }
};

int report_failure(getin_status s) {
    std::cerr << "error: " << getin_status_name(s) << ": " << getin_last_error() << "\n";
    return kExitContent;
}

bool read_text(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

// ---------------------------------------------------------------------------
// play
// ---------------------------------------------------------------------------

const char* style_marker(const std::string& style) {
    if (style == "error") return "! ";
    if (style == "sensitive") return "# ";
    if (style == "emphasis") return "* ";
    return "  ";
}

void print_cards(const json& cards) {
    for (const auto& c : cards) {
        std::cout << "  +-- Why this works: " << c.value("intent", "") << "\n";
        std::cout << "  +-- How to prevent it: " << c.value("prevention", "") << "\n";
    }
}

void print_view(const json& v) {
    std::cout << "\n== " << v.value("title", "") << " :: " << v.value("step", "") << "\n";
    std::cout << v.value("prompt", "") << "\n";
    for (const auto& c : v["choices"]) std::cout << "  [" << c["index"].get<int>() << "] " << c.value("label", "") << "\n";
    if (v.contains("hint")) std::cout << "  hint: " << v["hint"].get<std::string>() << "\n";
}

void print_output(const json& output) {
    for (const auto& l : output["lines"]) {
        std::cout << style_marker(l.value("style", "plain")) << l.value("text", "") << "\n";
    }
}

std::string input_prompt(const json& v) {
    if (v.contains("terminal_prompt")) return v["terminal_prompt"].get<std::string>();
    return v.value("expects", "choice") == "text" ? "text> " : "choice> ";
}

int cmd_play(const std::string& world, const std::string& scenarios, std::string scenario) {
    getin_game* game = nullptr;
    if (auto s = getin_game_load(world.c_str(), scenarios.c_str(), &game); s != GETIN_OK) return report_failure(s);
    getin_session* session = nullptr;
    getin_session_new(game, &session);

    int rc = kExitContent;
    std::string line;
    if (scenario.empty()) {
        Owned state;
        getin_session_view(session, &state.p);
        const auto menu = json::parse(state.str())["scenarios"];
        std::cout << "Pick a scenario:\n";
        for (const auto& s : menu) std::cout << "  " << s["id"].get<std::string>() << "  " << s["title"].get<std::string>() << "\n";
        std::cout << "scenario> " << std::flush;
        if (!std::getline(std::cin, line)) {
            getin_session_free(session);
            getin_game_free(game);
            return kExitContent;
        }
        scenario = line;
        while (!scenario.empty() && std::isspace(static_cast<unsigned char>(scenario.back()))) scenario.pop_back();
    }

    Owned first;
    if (auto s = getin_session_start(session, scenario.c_str(), 0, &first.p); s != GETIN_OK) {
        rc = report_failure(s);
    } else {
        json view = json::parse(first.str());
        print_view(view);
        print_cards(view["explanations"]);
        while (!view.value("terminal", false)) {
            std::cout << input_prompt(view) << std::flush;
            if (!std::getline(std::cin, line)) break;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line == ":quit") break;
            Owned result;
            const std::string kind = view.value("expects", "choice");
            if (auto s = getin_session_input(session, kind.c_str(), line.c_str(), &result.p); s != GETIN_OK) {
                report_failure(s);
                break;
            }
            const auto r = json::parse(result.str());
            print_output(r["output"]);
            if (r["status"] == "retry") {
                std::cout << "  (" << r.value("message", "try again") << ")\n";
                if (r["view"].contains("hint")) std::cout << "  hint: " << r["view"]["hint"].get<std::string>() << "\n";
                continue;
            }
            print_cards(r["explanations"]);
            view = r["view"];
            print_view(view);
        }
        if (view.value("terminal", false)) {
            std::cout << "\nScenario complete.\n";
            rc = kExitOk;
        }
    }
    getin_session_free(session);
    getin_game_free(game);
    return rc;
}

// ---------------------------------------------------------------------------
// validate, simulate, report, serve
// ---------------------------------------------------------------------------

int cmd_validate(const std::vector<std::string>& files, const std::string& world) {
    std::vector<const char*> ptrs;
    for (const auto& f : files) ptrs.push_back(f.c_str());
    Owned report;
    const auto s = getin_validate(world.empty() ? nullptr : world.c_str(), ptrs.data(), ptrs.size(), &report.p);
    if (!report.p) return report_failure(s);
    const auto j = json::parse(report.str());
    for (const auto& d : j["defects"]) std::cout << "defect: " << d.get<std::string>() << "\n";
    std::cout << j["table"].get<std::string>();
    if (!j["defects"].empty()) {
        std::cout << j["defects"].size() << " defect(s)\n";
        return kExitContent;
    }
    std::cout << "ok: " << j["scenarios"].size() << " scenario(s) valid\n";
    return kExitOk;
}

int cmd_simulate(const std::string& world, const std::string& scenarios, const std::string& script_path,
                 const std::string& out_path) {
    std::string script;
    if (!read_text(script_path, script)) {
        std::cerr << "error: cannot read script " << script_path << "\n";
        return kExitContent;
    }
    getin_game* game = nullptr;
    if (auto s = getin_game_load(world.c_str(), scenarios.c_str(), &game); s != GETIN_OK) return report_failure(s);
    Owned transcript;
    int terminal = 0;
    const auto s = getin_simulate(game, script.c_str(), &transcript.p, &terminal);
    getin_game_free(game);
    if (s != GETIN_OK) return report_failure(s);
    if (out_path == "-") {
        std::cout << transcript.str();
    } else if (!write_text(out_path, transcript.str())) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitContent;
    }
    return kExitOk;
}

int cmd_report(const std::string& store, const std::string& form, bool paired, bool responses,
               const std::string& out_path) {
    Owned csv;
    const char* mode = paired ? "paired" : responses ? "responses" : "aggregate";
    if (auto s = getin_survey_report(store.c_str(), form.c_str(), mode, &csv.p); s != GETIN_OK) {
        return report_failure(s);
    }
    if (out_path == "-") {
        std::cout << csv.str();
    } else if (!write_text(out_path, csv.str())) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitContent;
    }
    return kExitOk;
}

getin_service* g_service = nullptr;

void on_signal(int) {
    if (g_service) getin_service_stop(g_service);
}

int cmd_serve(const json& config, const std::string& host, int port) {
    getin_service* service = nullptr;
    if (auto s = getin_service_new(config.dump().c_str(), &service); s != GETIN_OK) return report_failure(s);
    if (char* err = getin_service_content_error(service)) {
        std::cerr << "warning: content failed to load; session endpoints will answer 500:\n" << err << "\n";
        getin_string_free(err);
    }
    g_service = service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    const auto s = getin_service_listen(service, host.c_str(), port);
    g_service = nullptr;
    getin_service_free(service);
    return s == GETIN_OK ? kExitOk : report_failure(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"The get in: attacker-perspective security awareness game"};
    app.require_subcommand(1);

    std::string world = env_or("GETIN_WORLD", kDefaultWorld);
    std::string scenarios = env_or("GETIN_SCENARIOS", kDefaultScenarios);

    auto* play = app.add_subcommand("play", "Play a scenario on the terminal");
    std::string scenario;
    play->add_option("--scenario", scenario, "Scenario id; asks when omitted");
    play->add_option("--world", world, "World file");
    play->add_option("--scenarios", scenarios, "Directory of .scenario files");

    auto* validate = app.add_subcommand("validate", "Check scenario files and print skill coverage");
    std::vector<std::string> files;
    std::string validate_world;
    validate->add_option("files", files, "Scenario files")->required()->check(CLI::ExistingFile);
    validate->add_option("--world", validate_world, "Also cross-check against this world file");

    auto* simulate = app.add_subcommand("simulate", "Run an input script and write its transcript");
    std::string script;
    std::string out = "-";
    simulate->add_option("--script", script, "Input script")->required();
    simulate->add_option("--out", out, "Transcript file, '-' for stdout")->required();
    simulate->add_option("--world", world, "World file");
    simulate->add_option("--scenarios", scenarios, "Directory of .scenario files");

    auto* report = app.add_subcommand("report", "Export survey results as CSV");
    std::string form;
    bool paired = false;
    bool responses = false;
    std::string store = env_or("GETIN_STORAGE", "storage") + "/responses.jsonl";
    std::string report_out;
    report->add_option("--form", form, "pre or post")->required()->check(CLI::IsMember({"pre", "post"}));
    report->add_flag("--paired", paired, "One row per token present in both forms");
    report->add_flag("--responses", responses, "One row per response instead of counts");
    report->add_option("--out", report_out, "CSV file, '-' for stdout")->required();
    report->add_option("--store", store, "Response store file");

    auto* serve = app.add_subcommand("serve", "Run the HTTP game service");
    std::string host = env_or("GETIN_HOST", "127.0.0.1");
    int port = std::atoi(env_or("GETIN_PORT", "8080").c_str());
    std::string storage = env_or("GETIN_STORAGE", "storage");
    std::string web = env_or("GETIN_WEB", "");
    bool unlinked = false;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
    serve->add_option("--world", world, "World file");
    serve->add_option("--scenarios", scenarios, "Directory of .scenario files");
    serve->add_option("--storage", storage, "Directory for session logs and survey responses");
    serve->add_option("--web", web, "Static client bundle served under /app");
    serve->add_flag("--unlinked", unlinked, "Store survey responses without tokens");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*play) return cmd_play(world, scenarios, scenario);
    if (*validate) return cmd_validate(files, validate_world);
    if (*simulate) return cmd_simulate(world, scenarios, script, out);
    if (*report) {
        if (paired && responses) {
            std::cerr << "error: --paired and --responses are exclusive\n";
            return kExitUsage;
        }
        return cmd_report(store, form, paired, responses, report_out);
    }
    if (*serve) {
        json config = {{"world", world}, {"scenarios", scenarios}, {"storage", storage}, {"web", web}, {"unlinked", unlinked}};
        return cmd_serve(config, host, port);
    }
    return kExitUsage;
}
