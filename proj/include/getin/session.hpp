#pragma once

#include "getin/content.hpp"
#include "getin/scenario.hpp"
#include "getin/world.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace getin {

// Scratch state of the scenario in progress; reset by every start.
struct ScenarioProgress {
    std::set<std::string> known_emails;
    std::map<std::string, bool> breach_checks;  // address -> breached
    bool phish_started = false;
    PhishingCampaign campaign;
    std::optional<std::string> logged_in_host;
    std::optional<std::string> exploit;
    std::map<std::string, std::string> exploit_options;
    RemoteSession remote;
    std::string cwd = "/";
    bool operator==(const ScenarioProgress&) const = default;
};

// Everything a start captures and an abandon restores.
struct Snapshot {
    WorldState world;
    std::vector<std::string> inventory;
    std::vector<Receipt> receipts;
    bool operator==(const Snapshot&) const = default;
};

enum class EventKind {
    ScenarioStarted,
    ScenarioAbandoned,
    InputReceived,
    InputRejected,
    TransitionTaken,
    MutationApplied,
    ExplanationShown,
    ScenarioCompleted,
};

std::string_view to_string(EventKind kind);

struct Event {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::InputReceived;
    std::string scenario;
    std::string from;
    std::string to;
    std::string input_kind;
    std::string input;
    std::optional<Mutation> mutation;
    std::string detail;
    std::int64_t timestamp_ms = 0;  // excluded from canonical form
    bool operator==(const Event&) const = default;
};

json to_json(const Event& e, bool with_timestamp = true);
Event event_from_json(const json& j);

struct SessionState {
    std::string session_id;
    std::string survey_token;  // fixed at creation
    std::optional<std::string> scenario_id;
    std::optional<std::string> current_step;
    WorldState world;
    std::vector<std::string> inventory;
    std::vector<Receipt> receipts;
    ScenarioProgress progress;
    std::set<std::string> completed;
    int rejections = 0;  // consecutive rejected inputs at the current step
    std::optional<Snapshot> snapshot;
    std::vector<Event> event_log;

    // A scenario is in progress while its current step is not terminal.
    [[nodiscard]] bool in_progress(const Catalog& catalog) const;
};

// Observable state without identifiers or the log itself; used to compare a
// live session with its replay.
json state_json(const SessionState& state);

// Applies one mutation. Throws on any precondition failure, leaving `state`
// partially modified; callers work on a copy.
void apply_mutation(SessionState& state, const Mutation& mutation);

// The reducer shared by live play and replay. Does not append to event_log.
void apply_event(SessionState& state, const Event& event, const Catalog& catalog);

struct ReplayResult {
    WorldState world;
    std::optional<std::string> step;
};

// Rebuilds a session from its initial world. Throws Error(CorruptLog) naming
// the first offending entry index.
SessionState rebuild(const WorldState& initial_world, const std::vector<Event>& log, const Catalog& catalog);
ReplayResult replay(const WorldState& initial_world, const std::vector<Event>& log, const Catalog& catalog);

// Event log text with timestamps and identifiers stripped, one event per line.
std::string canonical_log(const std::vector<Event>& log);

}  // namespace getin
