#include "drivers.hpp"

#include "oracles.hpp"

#include "getin/command.hpp"
#include "getin/content.hpp"
#include "getin/error.hpp"
#include "getin/service.hpp"
#include "getin/survey.hpp"
#include "getin/util.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace drivers {

using getin::json;

const getin::Engine& shipped_engine() {
    static const getin::Engine engine = getin::load_content(world_path(), scenario_dir());
    return engine;
}

namespace {

// Command lines from the shipped scripts, per scenario.
const std::map<std::string, std::vector<std::string>>& command_pool() {
    static const auto pool = [] {
        std::map<std::string, std::vector<std::string>> out;
        for (const auto& e : std::filesystem::directory_iterator(source_path("content/scripts"))) {
            std::ifstream in(e.path());
            std::string line, current;
            while (std::getline(in, line)) {
                if (line.rfind("start ", 0) == 0) current = line.substr(6);
                if (line.rfind("command ", 0) == 0) out[current].push_back(line.substr(8));
            }
        }
        return out;
    }();
    return pool;
}

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> byte(0, 255);
    std::string s(len(rng), '\0');
    for (auto& c : s) c = static_cast<char>(byte(rng));
    return s;
}

const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> v = {
        "search", "breach-check", "phish", "start", "select-template", "send", "scan", "use", "set", "run",
        "ls", "cd", "cat", "download", "login", "darknet", "browse", "buy", "usb", "flash", "label", "help",
        "TARGET", "PAYLOAD", "10.13.37.2", "10.13.37.0/28", "10.13.37.99", "/secrets", "/secrets/plans.txt",
        "..", "/", "\"", "'", "\"a b\"", "zero-day", "word-prank", "zd-hid-0419", "facebook-expiry",
        "exploit/windows/smb/simblue", "meterpreter/reverse_tcp", "a.brenner@hollowbrook-freight.example",
        "' OR '1'='1", "\\", "\t", "\xff\xfe", "*", "--", "$input",
    };
    return v;
}

std::string random_command(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n(0, 5);
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary().size() - 1);
    std::string s;
    const int words = n(rng);
    for (int i = 0; i < words; ++i) {
        if (i) s += ' ';
        s += vocabulary()[pick(rng)];
    }
    return s;
}

// One random input for the step the session is on; sometimes valid.
getin::PlayerInput random_input(const getin::SessionState& state, const getin::StepView& view,
                                std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 99);
    const int r = coin(rng);
    if (r < 8) return {getin::InputKind::Command, random_bytes(rng, 40)};
    if (r < 12) return {getin::InputKind::Text, random_command(rng)};
    if (view.expects == getin::InputKind::Choice) {
        std::uniform_int_distribution<int> idx(0, static_cast<int>(view.choices.size()) + 1);
        return {getin::InputKind::Choice, std::to_string(idx(rng))};
    }
    if (view.expects == getin::InputKind::Text) {
        return {getin::InputKind::Text, r < 60 ? "Quarterly bonus list" : random_command(rng)};
    }
    const auto& pool = command_pool();
    auto it = pool.find(state.scenario_id.value_or(""));
    if (r < 75 && it != pool.end() && !it->second.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
        return {getin::InputKind::Command, it->second[pick(rng)]};
    }
    return {getin::InputKind::Command, random_command(rng)};
}

const std::vector<std::string> kScenarios = {"phishing", "sqli", "exploit", "badusb"};

// Plays a session for `steps` actions; engine errors are part of normal play.
void play(const getin::Engine& engine, getin::SessionState& state, std::size_t steps, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 99);
    std::uniform_int_distribution<std::size_t> scn(0, kScenarios.size() - 1);
    for (std::size_t i = 0; i < steps; ++i) {
        try {
            const auto view = engine.view(state);
            const int r = coin(rng);
            if (!view || view->terminal || r < 3) {
                engine.start_scenario(state, kScenarios[scn(rng)], true);
            } else if (r < 5) {
                engine.abandon(state);
            } else {
                engine.submit_input(state, random_input(state, *view, rng));
            }
        } catch (const getin::Error&) {
        }
    }
}

// Everything an input may change apart from the log and the retry counter.
bool same_game_state(const getin::SessionState& a, const getin::SessionState& b) {
    return a.scenario_id == b.scenario_id && a.current_step == b.current_step && a.world == b.world &&
           a.inventory == b.inventory && a.receipts == b.receipts && a.progress == b.progress &&
           a.completed == b.completed && a.snapshot == b.snapshot;
}

}  // namespace

std::vector<LoginPair> login_corpus() {
    return {
        {"admin", "Tr0ub4dor&3"},                    // valid
        {"tester", "test-only-42"},                  // valid
        {"admin", "test-only-42"},                   // crossed
        {"' OR '1'='1", "' OR '1'='1"},              // classic tautology
        {"admin' OR '1'='1", "x"},                   // tautology in user only
        {"x", "' OR 'a'='a"},                        // tautology in password
        {"' OR ''='", "' OR ''='"},                  // empty-string tautology
        {"admin' AND '1'='1", "Tr0ub4dor&3"},       // still needs the password
        {"admin'", "x"},                             // unbalanced quote
        {"admin''", "Tr0ub4dor&3"},                  // escaped quote, wrong name
        {"' OR '1'='2", "' OR '1'='2"},              // false comparison
        {"' OR 1=1 --", "x"},                        // comment syntax unsupported
        {"' OR username='admin", "x"},               // column reference
        {"' OR nosuch='x", "x"},                     // unknown column
        {"') OR ('1'='1", "') OR ('1'='1"},          // parenthesized tautology
        {"admin", "' OR password='Tr0ub4dor&3"},    // password known, injected
        {"", ""},                                    // empty
        {"ADMIN", "Tr0ub4dor&3"},                    // case matters
        {"' or '1'='1", "' Or '1'='1"},              // mixed-case keywords
        {"'' OR ''", "x"},                           // near miss
    };
}

std::vector<LoginPair> login_fuzz(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> pieces = {
        "'", "''", " OR ", " or ", " AND ", "(", ")", "=", "'1'='1", "'a'", "1", "admin", "tester",
        "Tr0ub4dor&3", "test-only-42", "username", "password", "x", " ", "--", ";", "\"", "_col", "Or",
    };
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(0, 8);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::uniform_int_distribution<int> coin(0, 9);
    auto gen = [&] {
        if (coin(rng) == 0) return random_bytes(rng, 24);
        std::string s;
        for (int i = len(rng); i > 0; --i) s += pieces[pick(rng)];
        return s;
    };
    std::vector<LoginPair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto u = gen();
        auto p = gen();
        out.emplace_back(std::move(u), std::move(p));
    }
    return out;
}

Check check_login(const std::vector<LoginPair>& pairs) {
    Check c;
    const auto& gate = *shipped_engine().initial_world().login_gate;
    for (const auto& [u, p] : pairs) {
        ++c.cases;
        const auto got = getin::evaluate_login(gate, u, p);
        const auto want = oracle::login(gate.query_template, gate.user_field, gate.pass_field, gate.users, u, p);
        const bool accepted = got.outcome == getin::LoginOutcome::Accepted;
        if (accepted != want.accepted || got.malformed != want.malformed) {
            c.fail("user=" + json(getin::sanitize_utf8(u)).dump() + " pass=" + json(getin::sanitize_utf8(p)).dump() +
                   " evaluator=" + (accepted ? "accepted" : "rejected") +
                   " oracle=" + (want.accepted ? "accepted" : "rejected"));
        }
    }
    return c;
}

Check check_exploit_product() {
    Check c;
    const auto& world = shipped_engine().initial_world();
    for (const auto& e : world.exploits) {
        for (const auto& h : world.network) {
            ++c.cases;
            const auto configured = getin::configure_exploit(
                world.exploits, e.name, {{"TARGET", h.address}, {"PAYLOAD", e.payloads.front()}});
            const auto outcome = getin::run_exploit(configured, world);
            const bool want = oracle::exploit_opens(e, h);
            if (outcome.session_opened != want) c.fail(e.name + " x " + h.address);
            if (outcome.session_opened && (outcome.session.host != h.address || !outcome.session.open)) {
                c.fail(e.name + " x " + h.address + ": session does not point at the target");
            }
        }
    }
    return c;
}

Check check_replay(std::size_t sessions, std::uint64_t seed) {
    Check c;
    const auto& engine = shipped_engine();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len(5, 120);
    for (std::size_t s = 0; s < sessions; ++s) {
        ++c.cases;
        auto live = engine.new_session();
        play(engine, live, len(rng), rng);
        try {
            const auto rebuilt = engine.rebuild(live.event_log);
            if (getin::state_json(rebuilt) != getin::state_json(live)) {
                c.fail("session " + std::to_string(s) + ": replayed state differs");
            } else if (engine.session_json(rebuilt)["view"] != engine.session_json(live)["view"]) {
                c.fail("session " + std::to_string(s) + ": replayed view differs");
            }
        } catch (const getin::Error& e) {
            c.fail("session " + std::to_string(s) + ": " + e.what());
        }
    }
    return c;
}

Check check_restart(std::size_t sessions, std::uint64_t seed, const std::string& storage_dir) {
    Check c;
    std::filesystem::remove_all(storage_dir);
    getin::ServiceConfig config{world_path(), scenario_dir(), storage_dir, "", false};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(3, 60);
    std::uniform_int_distribution<int> coin(0, 99);
    std::uniform_int_distribution<std::size_t> scn(0, kScenarios.size() - 1);
    std::map<std::string, std::string> before;
    {
        getin::GameService service(config);
        for (std::size_t s = 0; s < sessions; ++s) {
            const auto created = json::parse(service.handle("POST", "/sessions", "").body);
            const std::string id = created["session_id"];
            const std::string base = "/sessions/" + id;
            for (int i = len(rng); i > 0; --i) {
                const auto state = json::parse(service.handle("GET", base, "").body);
                const auto& view = state["view"];
                const int r = coin(rng);
                if (view.is_null() || view.value("terminal", false) || r < 4) {
                    service.handle("POST", base + "/scenario/" + kScenarios[scn(rng)] + "/start", R"({"abandon":true})");
                    continue;
                }
                getin::SessionState probe;
                probe.scenario_id = view["scenario"].get<std::string>();
                getin::StepView sv;
                sv.expects = *getin::input_kind_from_string(view["expects"].get<std::string>());
                sv.choices.resize(view["choices"].size());
                const auto in = random_input(probe, sv, rng);
                const json body = {{"kind", getin::to_string(in.kind)}, {"value", getin::sanitize_utf8(in.value)}};
                service.handle("POST", base + "/input", body.dump());
            }
            before[id] = service.handle("GET", base, "").body;
        }
    }
    getin::GameService restarted(config);
    if (!restarted.quarantined().empty()) c.fail("restart quarantined " + restarted.quarantined().front().file);
    for (const auto& [id, body] : before) {
        ++c.cases;
        const auto after = restarted.handle("GET", "/sessions/" + id, "");
        if (after.status != 200 || after.body != body) c.fail("session " + id + " differs after restart");
    }
    return c;
}

Check check_parser_fuzz(std::size_t inputs, std::uint64_t seed) {
    Check c;
    const auto& engine = shipped_engine();
    std::mt19937_64 rng(seed);

    // Checkpoints: every step the shipped scripts pass through.
    std::vector<getin::SessionState> checkpoints;
    for (const auto& e : std::filesystem::directory_iterator(source_path("content/scripts"))) {
        std::ifstream in(e.path());
        std::stringstream ss;
        ss << in.rdbuf();
        std::string prefix;
        std::string line;
        std::istringstream lines(ss.str());
        while (std::getline(lines, line)) {
            prefix += line + "\n";
            auto run = getin::run_script(engine, prefix);
            if (const auto v = engine.view(run.state); v && !v->terminal) {
                run.state.event_log.clear();
                checkpoints.push_back(std::move(run.state));
            }
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, checkpoints.size() - 1);
    std::uniform_int_distribution<int> coin(0, 99);
    std::uniform_int_distribution<std::size_t> size(0, 4096);

    for (std::size_t i = 0; i < inputs; ++i) {
        ++c.cases;
        const auto& base = checkpoints[pick(rng)];
        const int r = coin(rng);
        std::string value;
        if (r < 40) {
            value = random_bytes(rng, r < 2 ? 4096 : 64);
        } else if (r < 90) {
            value = random_command(rng);
        } else {
            value = std::string(size(rng), "'( \"x"[r % 5]);
        }
        const auto kind = r % 7 == 0 ? getin::InputKind::Text
                        : r % 11 == 0 ? getin::InputKind::Choice
                                      : getin::InputKind::Command;

        // The parser alone must be total.
        const auto parsed = getin::parse_command(value);
        if (const auto* cmd = std::get_if<getin::Command>(&parsed)) {
            const auto again = getin::parse_command(getin::render(*cmd));
            if (!std::holds_alternative<getin::Command>(again)) c.fail("render does not parse back: " + value);
        }

        auto state = base;
        try {
            const auto result = engine.submit_input(state, {kind, value});
            bool error_lines = false;
            for (const auto& l : result.output.lines) error_lines = error_lines || l.style == getin::LineStyle::Error;
            if (result.status == getin::TransitionStatus::Retry || error_lines) {
                if (result.status != getin::TransitionStatus::Retry) c.fail("error output advanced: " + value);
                if (!same_game_state(state, base)) c.fail("rejected input changed state: " + getin::sanitize_utf8(value));
                for (const auto& ev : result.events) {
                    if (ev.kind != getin::EventKind::InputReceived && ev.kind != getin::EventKind::InputRejected) {
                        c.fail("rejected input logged " + std::string(getin::to_string(ev.kind)));
                    }
                }
            }
        } catch (const getin::Error& e) {
            c.fail(std::string("engine threw ") + e.what());
        } catch (const std::exception& e) {
            c.fail(std::string("crash-class exception ") + e.what());
        }
    }
    return c;
}

SurveyCheck check_survey(std::size_t pre_n, std::size_t post_n, std::uint64_t seed) {
    SurveyCheck out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coin(0, 99);
    std::uniform_int_distribution<int> likert(1, 5);
    getin::SurveyStore store;

    // What the oracle believes is stored: latest normalized answers per (form, token).
    std::map<std::pair<std::string, std::string>, getin::SurveyResponse> expected;

    auto answers_for = [&](getin::FormId form, getin::SurveyResponse& normalized) {
        json raw = json::object();
        for (const auto& q : getin::survey_form(form).questions) {
            if (coin(rng) < 8) continue;  // skipped question
            switch (q.kind) {
                case getin::QuestionKind::YesNo: {
                    const bool yes = coin(rng) < 70;
                    const int style = coin(rng) % 3;
                    raw[q.id] = style == 0 ? json(yes) : style == 1 ? json(yes ? "Yes" : "NO") : json(yes ? "yes" : "no");
                    normalized.answers[q.id] = yes ? "yes" : "no";
                    break;
                }
                case getin::QuestionKind::Likert: {
                    const int v = likert(rng);
                    raw[q.id] = v;
                    normalized.answers[q.id] = v;
                    break;
                }
                case getin::QuestionKind::FreeText:
                    raw[q.id] = "comment " + std::to_string(coin(rng));
                    normalized.answers[q.id] = raw[q.id];
                    break;
            }
        }
        return raw;
    };

    std::vector<std::string> pre_tokens;
    for (std::size_t i = 0; i < pre_n; ++i) pre_tokens.push_back("tok-" + std::to_string(i));

    auto submit = [&](getin::FormId form, const std::string& token) {
        getin::SurveyResponse normalized;
        normalized.token = token;
        normalized.form = form;
        const auto raw = answers_for(form, normalized);
        store.submit(form, token, raw);
        expected[{std::string(getin::to_string(form)), token}] = normalized;
    };

    for (const auto& t : pre_tokens) submit(getin::FormId::Pre, t);
    // A few players submit their pre form twice; the later one counts.
    for (std::size_t i = 0; i < pre_n / 25; ++i) submit(getin::FormId::Pre, pre_tokens[(i * 7) % pre_n]);
    // Most post responses come from pre players, some from people who skipped it.
    std::vector<std::string> shuffled = pre_tokens;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t linked = post_n - post_n / 10;
    for (std::size_t i = 0; i < post_n; ++i) {
        submit(getin::FormId::Post, i < linked ? shuffled[i % shuffled.size()] : "late-" + std::to_string(i));
    }

    std::vector<getin::SurveyResponse> want_pre, want_post;
    for (const auto& [key, r] : expected) (key.first == "pre" ? want_pre : want_post).push_back(r);

    const auto pre = store.responses(getin::FormId::Pre);
    const auto post = store.responses(getin::FormId::Post);
    for (const auto& [form, got, want] : {std::tuple{getin::FormId::Pre, &pre, &want_pre},
                                          std::tuple{getin::FormId::Post, &post, &want_post}}) {
        const auto report = getin::aggregate(getin::survey_form(form), *got, &pre);
        const auto truth = oracle::tally(*want);
        ++out.counts.cases;
        if (report.responses != want->size()) {
            out.counts.fail(std::string(getin::to_string(form)) + ": response count " +
                            std::to_string(report.responses) + " != " + std::to_string(want->size()));
        }
        for (const auto& q : report.questions) {
            const auto it = truth.find(q.question_id);
            std::size_t answered = 0;
            if (it != truth.end()) {
                for (const auto& [_, n] : it->second) answered += n;
            }
            ++out.counts.cases;
            if (q.answered != answered) out.counts.fail(q.question_id + ": answered mismatch");
            for (const auto& [value, n] : q.counts) {
                ++out.counts.cases;
                std::size_t want_n = 0;
                if (it != truth.end()) {
                    auto v = it->second.find(value.dump());
                    if (v != it->second.end()) want_n = v->second;
                }
                if (n != want_n) {
                    out.counts.fail(q.question_id + "=" + value.dump() + ": " + std::to_string(n) +
                                    " != " + std::to_string(want_n));
                }
            }
            // Every value the oracle saw must be listed.
            if (it != truth.end() && getin::survey_form(form).find(q.question_id)->kind != getin::QuestionKind::FreeText) {
                for (const auto& [value, n] : it->second) {
                    bool listed = false;
                    for (const auto& [v, _] : q.counts) listed = listed || v.dump() == value;
                    if (!listed) out.counts.fail(q.question_id + ": value " + value + " missing");
                }
            }
        }
    }

    const auto pairs = getin::paired(pre, post);
    const auto both = oracle::token_intersection(want_pre, want_post);
    ++out.pairing.cases;
    if (pairs.rows.size() != both.size()) {
        out.pairing.fail("paired rows " + std::to_string(pairs.rows.size()) + " != intersection " +
                         std::to_string(both.size()));
    }
    for (const auto& row : pairs.rows) {
        ++out.pairing.cases;
        if (!both.count(row.token)) out.pairing.fail("unexpected paired token " + row.token);
    }

    const auto& pre_form = getin::survey_form(getin::FormId::Pre);
    for (const json& v : {json(0), json(6), json(-1), json(7), json(100), json(2.5), json("3"), json(true), json(nullptr)}) {
        ++out.likert.cases;
        try {
            getin::validate_answers(pre_form, {{"phishing-rollout", v}});
            // null means "not answered", which is allowed.
            if (!v.is_null()) out.likert.fail("accepted Likert value " + v.dump());
        } catch (const getin::Error& e) {
            if (e.code() != getin::ErrorCode::ValidationFailed || v.is_null()) {
                out.likert.fail("wrong rejection for " + v.dump());
            }
        }
    }
    for (int v = 1; v <= 5; ++v) {
        ++out.likert.cases;
        try {
            getin::validate_answers(pre_form, {{"phishing-rollout", v}});
        } catch (const getin::Error&) {
            out.likert.fail("rejected Likert value " + std::to_string(v));
        }
    }
    return out;
}

}  // namespace drivers
