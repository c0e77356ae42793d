#include "getin/engine.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace getin {

namespace {

json explanation_json(const Explanation& e) { return {{"intent", e.intent}, {"prevention", e.prevention}}; }

std::string substitute_input(std::string text, const std::string& input) {
    static constexpr std::string_view slot = "$input";
    std::size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), input);
        pos += input.size();
    }
    return text;
}

Mutation with_input(Mutation m, const std::string& input) {
    for (auto& [_, v] : m.args) v = substitute_input(v, input);
    return m;
}

std::optional<int> parse_int(std::string_view text) {
    const auto t = trim(text);
    int value = 0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

bool keywords_match(const Matcher& m, const std::string& normalized) {
    return std::all_of(m.keywords.begin(), m.keywords.end(),
                       [&](const std::string& k) { return normalized.find(k) != std::string::npos; });
}

// Text fed to regexes is bounded: the standard library's matcher recurses per
// character.
inline constexpr std::size_t kMaxMatchedText = 4096;

}  // namespace

json to_json(const StepView& v) {
    json choices = json::array();
    for (const auto& c : v.choices) choices.push_back({{"index", c.index}, {"label", c.label}});
    json cards = json::array();
    for (const auto& e : v.explanations) cards.push_back(explanation_json(e));
    json j = {{"scenario", v.scenario_id},
              {"title", v.scenario_title},
              {"step", v.step_id},
              {"kind", to_string(v.kind)},
              {"expects", to_string(v.expects)},
              {"prompt", v.prompt},
              {"choices", std::move(choices)},
              {"terminal", v.terminal},
              {"explanations", std::move(cards)},
              {"pane", v.pane.empty() ? "terminal" : v.pane}};
    if (!v.terminal_prompt.empty()) j["terminal_prompt"] = v.terminal_prompt;
    if (!v.hint.empty()) j["hint"] = v.hint;
    return j;
}

json to_json(const TransitionResult& r) {
    json cards = json::array();
    for (const auto& e : r.explanations) cards.push_back(explanation_json(e));
    json j = {{"status", r.status == TransitionStatus::Advanced ? "advanced" : "retry"},
              {"view", to_json(r.view)},
              {"explanations", std::move(cards)},
              {"output", r.output.to_json()}};
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

Engine::Engine(WorldState initial_world, Catalog catalog)
    : initial_world_(std::move(initial_world)), catalog_(std::move(catalog)) {}

SessionState Engine::new_session() const {
    SessionState s;
    s.session_id = random_hex(16);
    s.survey_token = random_survey_token();
    s.world = initial_world_;
    return s;
}

void Engine::emit(SessionState& state, Event event, std::vector<Event>* sink) const {
    event.seq = state.event_log.size();
    event.timestamp_ms = now_millis();
    apply_event(state, event, catalog_);
    state.event_log.push_back(event);
    if (sink) sink->push_back(std::move(event));
}

StepView Engine::start_scenario(SessionState& state, const std::string& scenario_id, bool abandon) const {
    const auto* def = catalog_.find(scenario_id);
    if (!def) throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + scenario_id + "'");
    if (state.in_progress(catalog_)) {
        if (!abandon) {
            throw Error(ErrorCode::ScenarioInProgress,
                        "scenario '" + *state.scenario_id + "' is still in progress; abandon it first");
        }
        Engine::abandon(state);
    }
    Event e;
    e.kind = EventKind::ScenarioStarted;
    e.scenario = def->id;
    e.to = def->entry;
    emit(state, std::move(e), nullptr);

    // On-enter mutations of the entry step; a failure here is a content bug.
    const auto& entry = *def->step(def->entry);
    for (const auto& m : entry.mutations) {
        Event me;
        me.kind = EventKind::MutationApplied;
        me.scenario = def->id;
        me.mutation = m;
        emit(state, std::move(me), nullptr);
    }
    if (entry.explanation) {
        Event ee;
        ee.kind = EventKind::ExplanationShown;
        ee.scenario = def->id;
        ee.to = entry.id;
        emit(state, std::move(ee), nullptr);
    }
    return *view(state);
}

void Engine::abandon(SessionState& state) const {
    if (!state.in_progress(catalog_)) throw Error(ErrorCode::NoActiveScenario, "no scenario in progress");
    Event e;
    e.kind = EventKind::ScenarioAbandoned;
    e.scenario = *state.scenario_id;
    e.from = state.current_step.value_or("");
    emit(state, std::move(e), nullptr);
}

std::optional<StepView> Engine::view(const SessionState& state) const {
    if (!state.scenario_id || !state.current_step) return std::nullopt;
    const auto* def = catalog_.find(*state.scenario_id);
    if (!def) return std::nullopt;
    const auto* step = def->step(*state.current_step);
    if (!step) return std::nullopt;

    StepView v;
    v.scenario_id = def->id;
    v.scenario_title = def->title;
    v.step_id = step->id;
    v.kind = step->kind;
    v.expects = expected_input(step->kind);
    v.prompt = step->prompt;
    v.terminal = def->is_terminal(step->id);
    v.pane = step->pane;
    if (step->explanation) v.explanations.push_back(*step->explanation);
    for (const auto& t : step->transitions) {
        if (t.matcher.kind == Matcher::Kind::ChoiceIndex) v.choices.push_back({t.matcher.choice, t.matcher.label});
    }
    std::sort(v.choices.begin(), v.choices.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    if (step->kind == StepKind::CommandInput) v.terminal_prompt = terminal_prompt(state);
    if (!v.terminal && state.rejections >= kHintAfterRejections) v.hint = step->hint;
    return v;
}

TransitionResult Engine::reject(SessionState& state, const PlayerInput& input, std::string message,
                                TerminalOutput output) const {
    TransitionResult r;
    r.status = TransitionStatus::Retry;
    r.message = std::move(message);
    r.output = std::move(output);

    Event in;
    in.kind = EventKind::InputReceived;
    in.scenario = *state.scenario_id;
    in.from = *state.current_step;
    in.input_kind = std::string(to_string(input.kind));
    in.input = input.value;
    emit(state, std::move(in), &r.events);

    Event rej;
    rej.kind = EventKind::InputRejected;
    rej.scenario = *state.scenario_id;
    rej.from = *state.current_step;
    rej.detail = r.message;
    emit(state, std::move(rej), &r.events);

    r.view = *view(state);
    return r;
}

TransitionResult Engine::submit_input(SessionState& state, const PlayerInput& raw) const {
    if (!state.scenario_id || !state.current_step) {
        throw Error(ErrorCode::NoActiveScenario, "start a scenario first");
    }
    const auto* def = catalog_.find(*state.scenario_id);
    if (!def) throw Error(ErrorCode::NoActiveScenario, "scenario no longer loaded");
    if (def->is_terminal(*state.current_step)) {
        throw Error(ErrorCode::SessionTerminated, "scenario '" + def->id + "' is finished; pick another one");
    }
    const StepNode& step = *def->step(*state.current_step);

    PlayerInput input{raw.kind, sanitize_utf8(raw.value)};
    if (input.value.size() > kMaxInputLength) {
        input.value.resize(kMaxInputLength);
        input.value = sanitize_utf8(input.value);  // may have cut a sequence
        return reject(state, input, "input too long", {});
    }
    const InputKind expects = expected_input(step.kind);
    if (input.kind != expects) {
        return reject(state, input, "this step expects " + std::string(to_string(expects)) + " input", {});
    }

    const Transition* taken = nullptr;
    std::string substitution;
    TerminalOutput output;
    std::vector<Mutation> command_mutations;
    bool help = false;

    switch (expects) {
        case InputKind::Choice: {
            const auto n = parse_int(input.value);
            if (n) {
                for (const auto& t : step.transitions) {
                    if (t.matcher.kind == Matcher::Kind::ChoiceIndex && t.matcher.choice == *n) {
                        taken = &t;
                        break;
                    }
                }
            }
            if (!taken) return reject(state, input, "pick one of the listed options", {});
            substitution = trim(input.value);
            break;
        }
        case InputKind::Text: {
            const auto normalized = normalize_input(input.value);
            if (normalized.size() > kMaxMatchedText) return reject(state, input, "input too long", {});
            for (const auto& t : step.transitions) {
                const auto& m = t.matcher;
                const bool ok = (m.kind == Matcher::Kind::Keywords && keywords_match(m, normalized)) ||
                                (m.kind == Matcher::Kind::Regex && m.compiled &&
                                 std::regex_search(normalized, *m.compiled));
                if (ok) {
                    taken = &t;
                    break;
                }
            }
            if (!taken) return reject(state, input, "that does not fit here", {});
            substitution = trim(input.value);
            break;
        }
        case InputKind::Command: {
            const auto parsed = parse_command(input.value);
            if (const auto* err = std::get_if<ParseError>(&parsed)) {
                auto out = render_parse_error(*err);
                out.prompt = terminal_prompt(state);
                return reject(state, input, err->message, std::move(out));
            }
            const auto& cmd = std::get<Command>(parsed);
            std::vector<CommandPattern> permitted;
            for (const auto& t : step.transitions) {
                if (t.matcher.kind == Matcher::Kind::Command) permitted.push_back(t.matcher.command);
            }
            auto result = execute_command(state, cmd, &permitted);
            output = std::move(result.output);
            if (output.has_error()) {
                std::string msg;
                for (const auto& l : output.lines) {
                    if (l.style == LineStyle::Error) {
                        msg = l.text;
                        break;
                    }
                }
                return reject(state, input, msg, std::move(output));
            }
            if (cmd.verb == "help") {
                help = true;
                break;
            }
            for (const auto& t : step.transitions) {
                if (t.matcher.kind == Matcher::Kind::Command && t.matcher.command.matches(cmd) &&
                    glob_match(t.matcher.outcome, result.outcome)) {
                    taken = &t;
                    break;
                }
            }
            if (!taken) {
                if (!result.mutations.empty()) {
                    output.add("Nothing changed: that does not help here, so the simulation was rolled back.",
                               LineStyle::Error);
                }
                return reject(state, input, "that did not move the attack forward", std::move(output));
            }
            command_mutations = std::move(result.mutations);
            substitution = cmd.args.empty() ? std::string() : cmd.args.back();
            break;
        }
    }

    const std::string next = help ? step.id : taken->next;
    const StepNode& target = *def->step(next);

    // Work on a copy so a failing mutation leaves the session as it was,
    // apart from the rejection itself.
    SessionState work = state;
    TransitionResult r;
    r.status = TransitionStatus::Advanced;
    r.output = std::move(output);
    try {
        Event in;
        in.kind = EventKind::InputReceived;
        in.scenario = def->id;
        in.from = step.id;
        in.input_kind = std::string(to_string(input.kind));
        in.input = input.value;
        emit(work, std::move(in), &r.events);

        std::vector<Mutation> all = command_mutations;
        if (taken) {
            for (const auto& m : taken->mutations) all.push_back(with_input(m, substitution));
        }
        if (next != step.id) all.insert(all.end(), target.mutations.begin(), target.mutations.end());
        for (auto& m : all) {
            Event me;
            me.kind = EventKind::MutationApplied;
            me.scenario = def->id;
            me.from = step.id;
            me.mutation = std::move(m);
            emit(work, std::move(me), &r.events);
        }

        Event tr;
        tr.kind = EventKind::TransitionTaken;
        tr.scenario = def->id;
        tr.from = step.id;
        tr.to = next;
        emit(work, std::move(tr), &r.events);

        if (next != step.id && target.explanation) {
            Event ee;
            ee.kind = EventKind::ExplanationShown;
            ee.scenario = def->id;
            ee.to = next;
            emit(work, std::move(ee), &r.events);
            r.explanations.push_back(*target.explanation);
        }
        if (def->is_terminal(next)) {
            Event done;
            done.kind = EventKind::ScenarioCompleted;
            done.scenario = def->id;
            done.to = next;
            emit(work, std::move(done), &r.events);
        }
    } catch (const Error& e) {
        TerminalOutput out = std::move(r.output);
        out.add(std::string(to_string(e.code())) + ": " + e.what(), LineStyle::Error);
        return reject(state, input, e.what(), std::move(out));
    }
    if (!r.output.lines.empty() || expects == InputKind::Command) r.output.prompt = terminal_prompt(work);
    state = std::move(work);
    r.view = *view(state);
    return r;
}

json Engine::menu_json(const SessionState& state) const {
    json arr = json::array();
    for (const auto& [id, def] : catalog_.scenarios) {
        json skills = json::array();
        for (auto s : def.skills) skills.push_back(to_string(s));
        arr.push_back({{"id", id},
                       {"title", def.title},
                       {"skills", std::move(skills)},
                       {"completed", state.completed.contains(id)}});
    }
    return arr;
}

json Engine::session_json(const SessionState& state) const {
    const auto v = view(state);
    json receipts = json::array();
    for (const auto& r : state.receipts) {
        receipts.push_back({{"listing", r.listing_id}, {"price", r.price}, {"kind", to_string(r.kind)}});
    }
    return {{"session_id", state.session_id},
            {"survey_token", state.survey_token},
            {"view", v ? to_json(*v) : json(nullptr)},
            {"in_progress", state.in_progress(catalog_)},
            {"scenarios", menu_json(state)},
            {"progress",
             {{"completed", state.completed},
              {"inventory", state.inventory},
              {"receipts", std::move(receipts)},
              {"wallet", state.world.wallet.balance}}}};
}

SessionState Engine::rebuild(const std::vector<Event>& log) const {
    return getin::rebuild(initial_world_, log, catalog_);
}

namespace {

Engine checked(WorldState world, Catalog catalog) {
    std::vector<std::string> defects;
    for (const auto& [id, def] : catalog.scenarios) {
        for (auto& d : cross_check(def, world)) defects.push_back(id + ": " + d);
    }
    if (!defects.empty()) {
        throw Error(ErrorCode::ValidationError, "scenarios reference missing world entities", defects);
    }
    return Engine(std::move(world), std::move(catalog));
}

}  // namespace

Engine load_content(const std::string& world_path, const std::vector<std::string>& scenario_files) {
    auto world = load_world_file(world_path);
    Catalog catalog;
    for (const auto& f : scenario_files) {
        auto def = load_scenario_file(f);
        const std::string id = def.id;
        if (!catalog.scenarios.emplace(id, std::move(def)).second) {
            throw Error(ErrorCode::ValidationError, "duplicate scenario id " + id + " in " + f);
        }
    }
    return checked(std::move(world), std::move(catalog));
}

Engine load_content(const std::string& world_path, const std::string& scenario_dir) {
    auto world = load_world_file(world_path);
    return checked(std::move(world), load_catalog(scenario_dir));
}

ContentReport validate_content(const std::vector<std::string>& scenario_files,
                               const std::optional<std::string>& world_path) {
    ContentReport report;
    auto record = [&](const Error& e) {
        report.defects.push_back(e.what());
        for (const auto& d : e.details()) report.defects.push_back("  " + d);
    };
    std::vector<ScenarioDefinition> defs;
    std::set<std::string> ids;
    for (const auto& f : scenario_files) {
        try {
            auto def = load_scenario_file(f);
            if (!ids.insert(def.id).second) {
                report.defects.push_back(f + ": duplicate scenario id " + def.id);
                continue;
            }
            defs.push_back(std::move(def));
        } catch (const Error& e) {
            record(e);
        }
    }
    if (world_path) {
        try {
            const auto world = load_world_file(*world_path);
            for (const auto& def : defs) {
                for (const auto& d : cross_check(def, world)) report.defects.push_back(def.id + ": " + d);
            }
        } catch (const Error& e) {
            record(e);
        }
    }
    for (const auto& def : defs) report.scenario_ids.push_back(def.id);
    report.coverage = skill_coverage(defs);
    return report;
}

json to_json(const ContentReport& r) {
    json coverage = json::object();
    for (const auto& [skill, ids] : r.coverage) coverage[std::string(to_string(skill))] = ids;
    return {{"defects", r.defects},
            {"scenarios", r.scenario_ids},
            {"coverage", std::move(coverage)},
            {"table", coverage_table(r)}};
}

std::string coverage_table(const ContentReport& r) {
    std::size_t width = 5;
    for (auto skill : kAllSkills) width = std::max(width, to_string(skill).size());
    std::string out = "skill" + std::string(width - 5 + 2, ' ') + "scenarios\n";
    std::size_t covered = 0;
    for (auto skill : kAllSkills) {
        const auto name = std::string(to_string(skill));
        std::string ids;
        if (auto it = r.coverage.find(skill); it != r.coverage.end()) {
            for (const auto& id : it->second) ids += (ids.empty() ? "" : ", ") + id;
        }
        if (!ids.empty()) ++covered;
        out += name + std::string(width - name.size() + 2, ' ') + (ids.empty() ? "(not covered)" : ids) + "\n";
    }
    out += std::to_string(covered) + "/" + std::to_string(kAllSkills.size()) + " skills covered\n";
    return out;
}

// ---------------------------------------------------------------------------
// Scripted play
// ---------------------------------------------------------------------------

namespace {

void render_view(std::ostringstream& out, const StepView& v) {
    out << "[" << v.scenario_id << "/" << v.step_id << " " << to_string(v.kind) << (v.terminal ? " END" : "")
        << "]\n";
    TerminalOutput prompt;
    prompt.add(v.prompt);
    for (const auto& l : prompt.lines) out << "  " << l.text << "\n";
    for (const auto& c : v.choices) out << "  (" << c.index << ") " << c.label << "\n";
    if (!v.hint.empty()) out << "  hint: " << v.hint << "\n";
    if (!v.terminal_prompt.empty()) out << "  " << v.terminal_prompt << "\n";
}

void render_cards(std::ostringstream& out, const std::vector<Explanation>& cards) {
    for (const auto& e : cards) {
        out << "  <why> " << e.intent << "\n";
        out << "  <prevent> " << e.prevention << "\n";
    }
}

}  // namespace

ScriptRun run_script(const Engine& engine, std::string_view script) {
    ScriptRun run;
    run.state = engine.new_session();
    std::ostringstream out;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= script.size()) {
        auto end = script.find('\n', pos);
        if (end == std::string_view::npos) end = script.size();
        std::string line(script.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;

        const auto space = stripped.find(' ');
        const std::string op = stripped.substr(0, space);
        const std::string arg = space == std::string::npos ? "" : trim(stripped.substr(space + 1));
        if (op != "start" && op != "abandon" && op != "choice" && op != "text" && op != "command") {
            throw Error(ErrorCode::InvalidArgument,
                        "script line " + std::to_string(line_no) + ": unknown directive '" + op + "'");
        }
        out << "> " << stripped << "\n";
        try {
            if (op == "start") {
                render_view(out, engine.start_scenario(run.state, arg));
            } else if (op == "abandon") {
                engine.abandon(run.state);
                out << "  scenario abandoned; world restored\n";
            } else {
                const auto kind = *input_kind_from_string(op);
                const auto r = engine.submit_input(run.state, {kind, arg});
                out << r.output.to_text();
                if (r.status == TransitionStatus::Retry) out << "  RETRY: " << r.message << "\n";
                render_cards(out, r.explanations);
                if (r.status == TransitionStatus::Advanced || !r.view.hint.empty()) render_view(out, r.view);
            }
        } catch (const Error& e) {
            out << "  ERROR " << to_string(e.code()) << ": " << e.what() << "\n";
        }
    }
    if (const auto v = engine.view(run.state)) run.reached_terminal = v->terminal;
    out << "--- final ---\n";
    out << "completed: ";
    bool first = true;
    for (const auto& id : run.state.completed) {
        out << (first ? "" : ", ") << id;
        first = false;
    }
    out << "\nwallet: " << run.state.world.wallet.balance << "\n";
    out << "--- events ---\n" << canonical_log(run.state.event_log);
    run.transcript = out.str();
    return run;
}

}  // namespace getin
