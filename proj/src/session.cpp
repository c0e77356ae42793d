#include "getin/session.hpp"

#include "getin/error.hpp"

#include <algorithm>

namespace getin {

namespace {

constexpr std::pair<EventKind, std::string_view> kEventKinds[] = {
    {EventKind::ScenarioStarted, "scenario_started"},
    {EventKind::ScenarioAbandoned, "scenario_abandoned"},
    {EventKind::InputReceived, "input_received"},
    {EventKind::InputRejected, "input_rejected"},
    {EventKind::TransitionTaken, "transition_taken"},
    {EventKind::MutationApplied, "mutation_applied"},
    {EventKind::ExplanationShown, "explanation_shown"},
    {EventKind::ScenarioCompleted, "scenario_completed"},
};

const std::string& arg(const Mutation& m, const char* key) {
    auto it = m.args.find(key);
    if (it == m.args.end()) {
        throw Error(ErrorCode::InvalidArgument, "mutation " + m.op + " lacks '" + key + "'");
    }
    return it->second;
}

Prop& prop_ref(WorldState& world, const std::string& id) {
    auto it = std::find_if(world.props.begin(), world.props.end(), [&](const Prop& p) { return p.id == id; });
    if (it == world.props.end()) throw Error(ErrorCode::PropNotFound, "no prop '" + id + "'");
    return *it;
}

std::optional<std::string> connected_host(const SessionState& s) {
    if (s.progress.remote.open) return s.progress.remote.host;
    return s.progress.logged_in_host;
}

std::string upper(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::toupper(c); });
    return text;
}

json receipt_json(const Receipt& r) {
    return {{"listing", r.listing_id}, {"price", r.price}, {"kind", to_string(r.kind)}};
}

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kEventKinds) {
        if (k == kind) return name;
    }
    return "?";
}

json to_json(const Event& e, bool with_timestamp) {
    json j = {{"seq", e.seq}, {"kind", to_string(e.kind)}};
    if (!e.scenario.empty()) j["scenario"] = e.scenario;
    if (!e.from.empty()) j["from"] = e.from;
    if (!e.to.empty()) j["to"] = e.to;
    if (!e.input_kind.empty()) j["input_kind"] = e.input_kind;
    if (e.kind == EventKind::InputReceived) j["input"] = e.input;
    if (e.mutation) j["mutation"] = to_json(*e.mutation);
    if (!e.detail.empty()) j["detail"] = e.detail;
    if (with_timestamp) j["ts"] = e.timestamp_ms;
    return j;
}

Event event_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::CorruptLog, "event is not an object");
    Event e;
    try {
        e.seq = j.at("seq").get<std::uint64_t>();
        const auto kind = j.at("kind").get<std::string>();
        auto it = std::find_if(std::begin(kEventKinds), std::end(kEventKinds),
                               [&](const auto& p) { return p.second == kind; });
        if (it == std::end(kEventKinds)) throw Error(ErrorCode::CorruptLog, "unknown event kind " + kind);
        e.kind = it->first;
        e.scenario = j.value("scenario", "");
        e.from = j.value("from", "");
        e.to = j.value("to", "");
        e.input_kind = j.value("input_kind", "");
        e.input = j.value("input", "");
        if (j.contains("mutation")) e.mutation = mutation_from_json(j.at("mutation"));
        e.detail = j.value("detail", "");
        e.timestamp_ms = j.value("ts", std::int64_t{0});
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::CorruptLog, std::string("malformed event: ") + ex.what());
    }
    return e;
}

bool SessionState::in_progress(const Catalog& catalog) const {
    if (!scenario_id || !current_step) return false;
    const auto* def = catalog.find(*scenario_id);
    return def && !def->is_terminal(*current_step);
}

json state_json(const SessionState& s) {
    json receipts = json::array();
    for (const auto& r : s.receipts) receipts.push_back(receipt_json(r));
    const auto& p = s.progress;
    json campaign = {{"template", p.campaign.template_id},
                     {"target", p.campaign.target_email},
                     {"sent", p.campaign.sent}};
    if (p.campaign.captured) {
        campaign["captured"] = {{"username", p.campaign.captured->username},
                                {"password", p.campaign.captured->password}};
    }
    json progress = {{"known_emails", p.known_emails},
                     {"breach_checks", p.breach_checks},
                     {"phish_started", p.phish_started},
                     {"campaign", std::move(campaign)},
                     {"logged_in_host", p.logged_in_host.value_or("")},
                     {"exploit", p.exploit.value_or("")},
                     {"exploit_options", p.exploit_options},
                     {"remote", {{"host", p.remote.host}, {"open", p.remote.open}, {"downloads", p.remote.downloads}}},
                     {"cwd", p.cwd}};
    return {{"scenario", s.scenario_id.value_or("")},
            {"step", s.current_step.value_or("")},
            {"world", to_json(s.world)},
            {"inventory", s.inventory},
            {"receipts", std::move(receipts)},
            {"progress", std::move(progress)},
            {"completed", s.completed},
            {"rejections", s.rejections},
            {"has_snapshot", s.snapshot.has_value()}};
}

void apply_mutation(SessionState& s, const Mutation& m) {
    auto& world = s.world;
    auto& progress = s.progress;
    const std::string& op = m.op;

    if (op == "set-flag") {
        world.flags.insert(arg(m, "flag"));
    } else if (op == "reveal-prop") {
        world = reveal_prop(world, arg(m, "prop"));
    } else if (op == "use-prop") {
        world = use_prop(world, arg(m, "prop"));
    } else if (op == "purchase") {
        auto [next, receipt] = purchase_listing(world, arg(m, "listing"));
        world = std::move(next);
        s.inventory.push_back(receipt.kind == ListingKind::ZeroDayExploit ? std::string(kZeroDayItem)
                                                                           : receipt.listing_id);
        s.receipts.push_back(std::move(receipt));
    } else if (op == "flash-prop") {
        auto payload = payload_from_string(arg(m, "payload"));
        if (!payload) throw Error(ErrorCode::InvalidArgument, "unknown payload " + arg(m, "payload"));
        auto& prop = prop_ref(world, arg(m, "prop"));
        prop = flash_usb(prop, *payload, s.inventory);
    } else if (op == "label-prop") {
        auto& prop = prop_ref(world, arg(m, "prop"));
        prop = label_usb(prop, arg(m, "label"));
    } else if (op == "learn-email") {
        const auto& email = arg(m, "email");
        if (!is_valid_email(email)) throw Error(ErrorCode::MalformedEmail, "not an email address: " + email);
        progress.known_emails.insert(email);
    } else if (op == "breach-checked") {
        const auto& result = arg(m, "result");
        if (result != "breached" && result != "not-breached") {
            throw Error(ErrorCode::InvalidArgument, "breach result must be breached or not-breached");
        }
        progress.breach_checks[arg(m, "email")] = result == "breached";
    } else if (op == "phish-start") {
        progress.phish_started = true;
    } else if (op == "phish-template") {
        if (!progress.phish_started) throw Error(ErrorCode::InvalidArgument, "start the phishing kit first");
        progress.campaign = select_template(progress.campaign, world, arg(m, "template"));
    } else if (op == "phish-send") {
        if (!progress.phish_started) throw Error(ErrorCode::InvalidArgument, "start the phishing kit first");
        auto campaign = progress.campaign;
        campaign.target_email = arg(m, "email");
        auto [next, reaction] = send_phish(campaign, world, progress.known_emails);
        progress.campaign = std::move(next);
        if (reaction.submitted) world.flags.insert("credentials-captured");
    } else if (op == "login") {
        const auto& host = arg(m, "host");
        if (!world.login_gate || world.login_gate->host != host) {
            throw Error(ErrorCode::UnknownHost, "no login form on " + host);
        }
        progress.logged_in_host = host;
        progress.cwd = "/";
    } else if (op == "set-cwd") {
        const auto host = connected_host(s);
        if (!host) throw Error(ErrorCode::InvalidArgument, "not connected to any host");
        const auto* h = find_host(world, *host);
        if (!h) throw Error(ErrorCode::UnknownHost, "no host at " + *host);
        const auto node = fs_navigate(*h, resolve_path(progress.cwd, arg(m, "path")));
        if (node.kind != NodeKind::Directory) throw Error(ErrorCode::NotADirectory, node.path + " is not a directory");
        progress.cwd = node.path;
    } else if (op == "exploit-use") {
        const auto& name = arg(m, "exploit");
        if (!find_exploit(world.exploits, name)) throw Error(ErrorCode::UnknownExploit, "no exploit named " + name);
        progress.exploit = name;
        progress.exploit_options.clear();
    } else if (op == "exploit-set") {
        if (!progress.exploit) throw Error(ErrorCode::InvalidArgument, "select an exploit with 'use' first");
        progress.exploit_options[upper(arg(m, "key"))] = arg(m, "value");
    } else if (op == "session-open") {
        const auto& host = arg(m, "host");
        if (!find_host(world, host)) throw Error(ErrorCode::UnknownHost, "no host at " + host);
        progress.remote = RemoteSession{host, true, {}};
        progress.cwd = "/";
    } else if (op == "download") {
        progress.remote = download_file(progress.remote, world, resolve_path(progress.cwd, arg(m, "path")));
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown mutation op '" + op + "'");
    }
}

void apply_event(SessionState& s, const Event& e, const Catalog& catalog) {
    switch (e.kind) {
        case EventKind::ScenarioStarted: {
            const auto* def = catalog.find(e.scenario);
            if (!def) throw Error(ErrorCode::UnknownScenario, "unknown scenario " + e.scenario);
            if (s.in_progress(catalog)) {
                throw Error(ErrorCode::ScenarioInProgress, "scenario " + *s.scenario_id + " still in progress");
            }
            s.snapshot = Snapshot{s.world, s.inventory, s.receipts};
            s.progress = ScenarioProgress{};
            s.scenario_id = def->id;
            s.current_step = def->entry;
            s.rejections = 0;
            break;
        }
        case EventKind::ScenarioAbandoned: {
            if (!s.scenario_id || !s.snapshot) throw Error(ErrorCode::NoActiveScenario, "nothing to abandon");
            s.world = s.snapshot->world;
            s.inventory = s.snapshot->inventory;
            s.receipts = s.snapshot->receipts;
            s.snapshot.reset();
            s.progress = ScenarioProgress{};
            s.scenario_id.reset();
            s.current_step.reset();
            s.rejections = 0;
            break;
        }
        case EventKind::InputReceived:
        case EventKind::ExplanationShown:
            if (!s.scenario_id) throw Error(ErrorCode::NoActiveScenario, "event outside a scenario");
            break;
        case EventKind::InputRejected:
            if (!s.scenario_id) throw Error(ErrorCode::NoActiveScenario, "event outside a scenario");
            ++s.rejections;
            break;
        case EventKind::TransitionTaken: {
            const auto* def = s.scenario_id ? catalog.find(*s.scenario_id) : nullptr;
            if (!def) throw Error(ErrorCode::NoActiveScenario, "transition outside a scenario");
            if (!s.current_step || *s.current_step != e.from) {
                throw Error(ErrorCode::CorruptLog, "transition from " + e.from + " but current step is " +
                                                       s.current_step.value_or("<none>"));
            }
            if (!def->step(e.to)) throw Error(ErrorCode::CorruptLog, "transition to unknown step " + e.to);
            s.current_step = e.to;
            s.rejections = 0;
            break;
        }
        case EventKind::MutationApplied:
            if (!e.mutation) throw Error(ErrorCode::CorruptLog, "mutation event without mutation");
            apply_mutation(s, *e.mutation);
            break;
        case EventKind::ScenarioCompleted:
            if (!s.scenario_id || *s.scenario_id != e.scenario) {
                throw Error(ErrorCode::CorruptLog, "completion of a scenario that is not active");
            }
            s.completed.insert(e.scenario);
            break;
    }
}

SessionState rebuild(const WorldState& initial_world, const std::vector<Event>& log, const Catalog& catalog) {
    SessionState s;
    s.world = initial_world;
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != i) {
            throw Error(ErrorCode::CorruptLog, "event " + std::to_string(i) + ": sequence gap",
                        {std::to_string(i)});
        }
        try {
            apply_event(s, log[i], catalog);
        } catch (const Error& err) {
            throw Error(ErrorCode::CorruptLog, "event " + std::to_string(i) + ": " + err.what(),
                        {std::to_string(i)});
        }
        s.event_log.push_back(log[i]);
    }
    return s;
}

ReplayResult replay(const WorldState& initial_world, const std::vector<Event>& log, const Catalog& catalog) {
    auto s = rebuild(initial_world, log, catalog);
    return {std::move(s.world), std::move(s.current_step)};
}

std::string canonical_log(const std::vector<Event>& log) {
    std::string out;
    for (const auto& e : log) {
        out += dump_json(to_json(e, false));
        out.push_back('\n');
    }
    return out;
}

}  // namespace getin
