#pragma once

#include "getin/command.hpp"
#include "getin/util.hpp"
#include "getin/world.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace getin {

// The seven user-protection skills a scenario can be tagged with.
enum class SkillTag {
    MalwareViaWebsites,
    MalwareViaPhishing,
    PiiTheftViaWebsites,
    PiiTheftViaPhishing,
    PiiViaSocialMedia,
    UsbExploitation,
    PasswordExploitation,
};

inline constexpr std::array<SkillTag, 7> kAllSkills = {
    SkillTag::MalwareViaWebsites,  SkillTag::MalwareViaPhishing, SkillTag::PiiTheftViaWebsites,
    SkillTag::PiiTheftViaPhishing, SkillTag::PiiViaSocialMedia,  SkillTag::UsbExploitation,
    SkillTag::PasswordExploitation,
};

std::string_view to_string(SkillTag skill);
std::optional<SkillTag> skill_from_string(std::string_view text);

enum class StepKind { Narration, ExplanationCard, Choice, TextInput, CommandInput, WorldMutation, Consequence };

std::string_view to_string(StepKind kind);

enum class InputKind { Choice, Text, Command };

std::string_view to_string(InputKind kind);
std::optional<InputKind> input_kind_from_string(std::string_view text);

// The input a step of this kind consumes.
InputKind expected_input(StepKind kind);

struct Explanation {
    std::string intent;
    std::string prevention;
    bool operator==(const Explanation&) const = default;
};

// A world change declared by content or derived from a command. `op` names
// the change, `args` carries its parameters; the session reducer applies it.
struct Mutation {
    std::string op;
    std::map<std::string, std::string> args;
    bool operator==(const Mutation&) const = default;
};

json to_json(const Mutation& m);
Mutation mutation_from_json(const json& j);

// Required argument names per mutation op; unknown ops are absent.
const std::map<std::string, std::vector<std::string>>& mutation_ops();

struct Matcher {
    enum class Kind { ChoiceIndex, Keywords, Command, Regex };
    Kind kind = Kind::ChoiceIndex;
    int choice = 0;
    std::string label;
    std::vector<std::string> keywords;  // lowercased
    CommandPattern command;
    std::string outcome = "*";          // glob over the command outcome tag
    std::string regex;
    std::shared_ptr<const std::regex> compiled;
};

struct Transition {
    Matcher matcher;
    std::string next;
    // Applied when taken; "$input" in an argument is replaced by the player's text.
    std::vector<Mutation> mutations;
};

struct StepNode {
    std::string id;
    StepKind kind = StepKind::Narration;
    std::string prompt;
    std::optional<Explanation> explanation;
    std::vector<Transition> transitions;
    std::vector<Mutation> mutations;  // applied on entering the step
    std::string hint;                 // shown after repeated rejected input
    std::string pane;                 // client render hint
};

struct ScenarioDefinition {
    std::string id;
    std::string title;
    std::vector<SkillTag> skills;
    std::map<std::string, StepNode> steps;
    std::string entry;
    std::set<std::string> terminals;

    [[nodiscard]] const StepNode* step(std::string_view id) const;
    [[nodiscard]] bool is_terminal(std::string_view id) const { return terminals.contains(std::string(id)); }
};

// Parses and validates. Throws Error(ParseError) with a line:column position
// for syntax problems and Error(ValidationError) carrying every defect.
ScenarioDefinition load_scenario(std::string_view document);
ScenarioDefinition load_scenario_file(const std::string& path);

// Structural parse only; no graph validation.
ScenarioDefinition scenario_from_json(const json& document);

std::vector<std::string> validate_scenario(const ScenarioDefinition& def);

// Checks that props, listings, hosts and templates named by mutations exist.
std::vector<std::string> cross_check(const ScenarioDefinition& def, const WorldState& world);

// Steps reachable from the entry, by breadth-first search.
std::set<std::string> reachable_steps(const ScenarioDefinition& def);

std::map<SkillTag, std::vector<std::string>> skill_coverage(const std::vector<ScenarioDefinition>& defs);

struct Catalog {
    std::map<std::string, ScenarioDefinition> scenarios;

    [[nodiscard]] const ScenarioDefinition* find(std::string_view id) const;
    [[nodiscard]] std::vector<ScenarioDefinition> all() const;
};

// Loads every *.scenario file in `dir`, sorted by file name.
Catalog load_catalog(const std::string& dir);

}  // namespace getin
