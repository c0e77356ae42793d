#pragma once

#include "getin/scenario.hpp"
#include "getin/session.hpp"
#include "getin/terminal.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace getin {

struct PlayerInput {
    InputKind kind = InputKind::Choice;
    std::string value;
};

struct ChoiceView {
    int index = 0;
    std::string label;
    bool operator==(const ChoiceView&) const = default;
};

// What a client may see of the current step. Carries labels, never matchers.
struct StepView {
    std::string scenario_id;
    std::string scenario_title;
    std::string step_id;
    StepKind kind = StepKind::Narration;
    InputKind expects = InputKind::Choice;
    std::string prompt;
    std::vector<ChoiceView> choices;
    bool terminal = false;
    std::vector<Explanation> explanations;  // cards attached to this step
    std::string pane;
    std::string terminal_prompt;  // command steps only
    std::string hint;             // set once the player has failed three times in a row
    bool operator==(const StepView&) const = default;
};

json to_json(const StepView& view);

enum class TransitionStatus { Advanced, Retry };

struct TransitionResult {
    TransitionStatus status = TransitionStatus::Retry;
    StepView view;
    std::vector<Explanation> explanations;  // shown by this transition
    TerminalOutput output;                  // command steps
    std::string message;                    // why an input was rejected
    std::vector<Event> events;              // appended to the log by this call
};

json to_json(const TransitionResult& result);

inline constexpr std::size_t kMaxInputLength = 64 * 1024;
inline constexpr int kHintAfterRejections = 3;

// Owns the immutable content and drives sessions. Every state change goes
// through events folded by apply_event, so a log always replays to the same
// state. Not synchronized: callers serialize access per session.
class Engine {
public:
    Engine(WorldState initial_world, Catalog catalog);

    [[nodiscard]] const WorldState& initial_world() const { return initial_world_; }
    [[nodiscard]] const Catalog& catalog() const { return catalog_; }

    // Fresh session with random identifiers and the initial world.
    [[nodiscard]] SessionState new_session() const;

    // Throws UnknownScenario, or ScenarioInProgress unless `abandon` is set.
    StepView start_scenario(SessionState& state, const std::string& scenario_id, bool abandon = false) const;
    // Restores the world captured at start. Throws NoActiveScenario.
    void abandon(SessionState& state) const;

    // Throws NoActiveScenario or SessionTerminated; every other problem is a
    // Retry result with the step unchanged.
    TransitionResult submit_input(SessionState& state, const PlayerInput& input) const;

    [[nodiscard]] std::optional<StepView> view(const SessionState& state) const;

    // Scenario menu with completion marks.
    [[nodiscard]] json menu_json(const SessionState& state) const;
    // Full client state: ids, current view, menu, inventory, wallet.
    [[nodiscard]] json session_json(const SessionState& state) const;

    [[nodiscard]] SessionState rebuild(const std::vector<Event>& log) const;

private:
    void emit(SessionState& state, Event event, std::vector<Event>* sink) const;
    TransitionResult reject(SessionState& state, const PlayerInput& input, std::string message,
                            TerminalOutput output) const;

    WorldState initial_world_;
    Catalog catalog_;
};

// Loads and cross-checks a world file and scenario files. Throws
// WorldLoadError, ParseError or ValidationError naming the file.
Engine load_content(const std::string& world_path, const std::vector<std::string>& scenario_files);
// Every *.scenario file in a directory, sorted by name.
Engine load_content(const std::string& world_path, const std::string& scenario_dir);

struct ContentReport {
    std::vector<std::string> defects;
    std::vector<std::string> scenario_ids;
    std::map<SkillTag, std::vector<std::string>> coverage;
};

// Collects every defect across the given files instead of stopping at the
// first; with a world file also checks the entities scenarios refer to.
ContentReport validate_content(const std::vector<std::string>& scenario_files,
                               const std::optional<std::string>& world_path);
json to_json(const ContentReport& report);
// Skill -> scenario table, one line per skill.
std::string coverage_table(const ContentReport& report);

// Scripted play for golden transcripts. One input per line:
//   start <id> | abandon | choice <n> | text <value> | command <line>
// Blank lines and lines starting with '#' are skipped. The transcript holds
// no identifiers or timestamps, so the same script always yields the same
// bytes. Throws Error(InvalidArgument) with a line number on malformed
// script lines; engine errors are recorded in the transcript.
struct ScriptRun {
    std::string transcript;
    SessionState state;
    bool reached_terminal = false;
};

ScriptRun run_script(const Engine& engine, std::string_view script);

}  // namespace getin
