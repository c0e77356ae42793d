#include "getin/scenario.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>

namespace getin {

namespace {

constexpr std::pair<SkillTag, std::string_view> kSkillNames[] = {
    {SkillTag::MalwareViaWebsites, "Preventing malware via non-trustworthy websites"},
    {SkillTag::MalwareViaPhishing, "Preventing malware via email phishing"},
    {SkillTag::PiiTheftViaWebsites,
     "Preventing Personal Identifiable Information theft via access to non-trustworthy websites"},
    {SkillTag::PiiTheftViaPhishing, "Preventing Personal Identifiable Information theft via email phishing"},
    {SkillTag::PiiViaSocialMedia, "Preventing Personal Identifiable Information via social media"},
    {SkillTag::UsbExploitation,
     "Preventing information system compromise via USB or storage device exploitation"},
    {SkillTag::PasswordExploitation, "Preventing unauthorized information system access via password exploitation"},
};

constexpr std::pair<StepKind, std::string_view> kStepKinds[] = {
    {StepKind::Narration, "narration"},          {StepKind::ExplanationCard, "explanation"},
    {StepKind::Choice, "choice"},                {StepKind::TextInput, "text"},
    {StepKind::CommandInput, "command"},         {StepKind::WorldMutation, "mutation"},
    {StepKind::Consequence, "consequence"},
};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, "scenario: " + what); }

std::string req_string(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) bad(ctx + ": missing string '" + key + "'");
    return it->get<std::string>();
}

std::string opt_string(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) return {};
    if (!it->is_string()) bad(ctx + ": '" + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<Mutation> mutations_from(const json& obj, const std::string& ctx) {
    std::vector<Mutation> out;
    auto it = obj.find("mutations");
    if (it == obj.end()) return out;
    if (!it->is_array()) bad(ctx + ": 'mutations' must be an array");
    for (const auto& m : *it) out.push_back(mutation_from_json(m));
    return out;
}

Transition transition_from(const json& t, const std::string& ctx) {
    check_keys(t, {"choice", "label", "keywords", "regex", "command", "outcome", "next", "mutations"}, ctx);
    Transition tr;
    tr.next = req_string(t, "next", ctx);
    tr.mutations = mutations_from(t, ctx);
    const int kinds = static_cast<int>(t.contains("choice")) + static_cast<int>(t.contains("keywords")) +
                      static_cast<int>(t.contains("regex")) + static_cast<int>(t.contains("command"));
    if (kinds != 1) bad(ctx + ": a transition needs exactly one of choice, keywords, regex, command");

    auto& m = tr.matcher;
    if (auto it = t.find("choice"); it != t.end()) {
        if (!it->is_number_integer()) bad(ctx + ": 'choice' must be an integer");
        m.kind = Matcher::Kind::ChoiceIndex;
        m.choice = it->get<int>();
        m.label = opt_string(t, "label", ctx);
    } else if (auto it = t.find("keywords"); it != t.end()) {
        if (!it->is_array() || it->empty()) bad(ctx + ": 'keywords' must be a non-empty array");
        m.kind = Matcher::Kind::Keywords;
        for (const auto& k : *it) {
            if (!k.is_string()) bad(ctx + ": keywords must be strings");
            m.keywords.push_back(normalize_input(k.get<std::string>()));
        }
    } else if (auto it = t.find("regex"); it != t.end()) {
        m.kind = Matcher::Kind::Regex;
        m.regex = req_string(t, "regex", ctx);
        try {
            m.compiled = std::make_shared<const std::regex>(m.regex, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            bad(ctx + ": invalid regex '" + m.regex + "'");
        }
    } else {
        m.kind = Matcher::Kind::Command;
        m.command = parse_pattern(req_string(t, "command", ctx));
        if (t.contains("outcome")) m.outcome = req_string(t, "outcome", ctx);
    }
    if (m.kind != Matcher::Kind::Command && t.contains("outcome")) bad(ctx + ": 'outcome' needs a command matcher");
    if (m.kind != Matcher::Kind::ChoiceIndex && t.contains("label")) bad(ctx + ": 'label' needs a choice matcher");
    return tr;
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

std::string_view to_string(SkillTag skill) {
    for (const auto& [tag, name] : kSkillNames) {
        if (tag == skill) return name;
    }
    return "?";
}

std::optional<SkillTag> skill_from_string(std::string_view text) {
    for (const auto& [tag, name] : kSkillNames) {
        if (name == text) return tag;
    }
    return std::nullopt;
}

std::string_view to_string(StepKind kind) {
    for (const auto& [k, name] : kStepKinds) {
        if (k == kind) return name;
    }
    return "?";
}

std::string_view to_string(InputKind kind) {
    switch (kind) {
        case InputKind::Choice: return "choice";
        case InputKind::Text: return "text";
        case InputKind::Command: return "command";
    }
    return "?";
}

std::optional<InputKind> input_kind_from_string(std::string_view text) {
    if (text == "choice") return InputKind::Choice;
    if (text == "text") return InputKind::Text;
    if (text == "command") return InputKind::Command;
    return std::nullopt;
}

InputKind expected_input(StepKind kind) {
    switch (kind) {
        case StepKind::TextInput: return InputKind::Text;
        case StepKind::CommandInput: return InputKind::Command;
        default: return InputKind::Choice;
    }
}

json to_json(const Mutation& m) {
    json j = {{"op", m.op}};
    for (const auto& [k, v] : m.args) j[k] = v;
    return j;
}

Mutation mutation_from_json(const json& j) {
    if (!j.is_object()) bad("mutation must be an object");
    Mutation m;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) bad("mutation field '" + k + "' must be a string");
        if (k == "op") {
            m.op = v.get<std::string>();
        } else {
            m.args[k] = v.get<std::string>();
        }
    }
    if (m.op.empty()) bad("mutation without 'op'");
    return m;
}

const std::map<std::string, std::vector<std::string>>& mutation_ops() {
    static const std::map<std::string, std::vector<std::string>> ops = {
        {"set-flag", {"flag"}},
        {"reveal-prop", {"prop"}},
        {"use-prop", {"prop"}},
        {"purchase", {"listing"}},
        {"flash-prop", {"prop", "payload"}},
        {"label-prop", {"prop", "label"}},
        {"learn-email", {"email"}},
        {"breach-checked", {"email", "result"}},
        {"phish-start", {}},
        {"phish-template", {"template"}},
        {"phish-send", {"email"}},
        {"login", {"host"}},
        {"set-cwd", {"path"}},
        {"exploit-use", {"exploit"}},
        {"exploit-set", {"key", "value"}},
        {"session-open", {"host"}},
        {"download", {"path"}},
    };
    return ops;
}

const StepNode* ScenarioDefinition::step(std::string_view id) const {
    auto it = steps.find(std::string(id));
    return it == steps.end() ? nullptr : &it->second;
}

ScenarioDefinition scenario_from_json(const json& doc) {
    check_keys(doc, {"id", "title", "skills", "entry", "steps", "terminals"}, "scenario");
    ScenarioDefinition def;
    def.id = req_string(doc, "id", "scenario");
    def.title = req_string(doc, "title", "scenario " + def.id);
    def.entry = req_string(doc, "entry", "scenario " + def.id);

    auto skills = doc.find("skills");
    if (skills == doc.end() || !skills->is_array()) bad(def.id + ": missing array 'skills'");
    for (const auto& s : *skills) {
        if (!s.is_string()) bad(def.id + ": skills must be strings");
        auto tag = skill_from_string(s.get<std::string>());
        if (!tag) bad(def.id + ": unknown skill '" + s.get<std::string>() + "'");
        def.skills.push_back(*tag);
    }

    auto terminals = doc.find("terminals");
    if (terminals == doc.end() || !terminals->is_array()) bad(def.id + ": missing array 'terminals'");
    for (const auto& t : *terminals) {
        if (!t.is_string()) bad(def.id + ": terminals must be strings");
        def.terminals.insert(t.get<std::string>());
    }

    auto steps = doc.find("steps");
    if (steps == doc.end() || !steps->is_object()) bad(def.id + ": missing object 'steps'");
    for (const auto& [id, s] : steps->items()) {
        const std::string ctx = def.id + "." + id;
        check_keys(s, {"kind", "prompt", "explanation", "transitions", "mutations", "hint", "pane"}, ctx);
        StepNode node;
        node.id = id;
        const std::string kind = req_string(s, "kind", ctx);
        auto k = std::find_if(std::begin(kStepKinds), std::end(kStepKinds),
                              [&](const auto& p) { return p.second == kind; });
        if (k == std::end(kStepKinds)) bad(ctx + ": unknown step kind '" + kind + "'");
        node.kind = k->first;
        node.prompt = req_string(s, "prompt", ctx);
        node.hint = opt_string(s, "hint", ctx);
        node.pane = opt_string(s, "pane", ctx);
        if (auto e = s.find("explanation"); e != s.end()) {
            check_keys(*e, {"intent", "prevention"}, ctx + " explanation");
            node.explanation = Explanation{opt_string(*e, "intent", ctx), opt_string(*e, "prevention", ctx)};
        }
        if (auto t = s.find("transitions"); t != s.end()) {
            if (!t->is_array()) bad(ctx + ": 'transitions' must be an array");
            for (std::size_t i = 0; i < t->size(); ++i) {
                node.transitions.push_back(transition_from((*t)[i], ctx + " transition " + std::to_string(i)));
            }
        }
        node.mutations = mutations_from(s, ctx);
        def.steps.emplace(id, std::move(node));
    }
    return def;
}

std::set<std::string> reachable_steps(const ScenarioDefinition& def) {
    std::set<std::string> seen;
    if (!def.steps.contains(def.entry)) return seen;
    std::deque<std::string> queue{def.entry};
    seen.insert(def.entry);
    while (!queue.empty()) {
        const auto* step = def.step(queue.front());
        queue.pop_front();
        for (const auto& t : step->transitions) {
            if (def.steps.contains(t.next) && seen.insert(t.next).second) queue.push_back(t.next);
        }
    }
    return seen;
}

std::vector<std::string> validate_scenario(const ScenarioDefinition& def) {
    std::vector<std::string> defects;
    if (def.id.empty()) defects.push_back("scenario id is empty");
    if (def.skills.empty()) defects.push_back("scenario has no skill tags");
    if (!def.steps.contains(def.entry)) defects.push_back("entry not found: " + def.entry);

    for (const auto& t : def.terminals) {
        if (!def.steps.contains(t)) defects.push_back("terminal not found: " + t);
    }
    if (def.terminals.empty()) defects.push_back("scenario declares no terminal step");

    const auto& ops = mutation_ops();
    auto check_mutations = [&](const std::vector<Mutation>& list, const std::string& where) {
        for (const auto& m : list) {
            auto op = ops.find(m.op);
            if (op == ops.end()) {
                defects.push_back(where + ": unknown mutation op '" + m.op + "'");
                continue;
            }
            for (const auto& arg : op->second) {
                if (!m.args.contains(arg)) defects.push_back(where + ": mutation " + m.op + " lacks '" + arg + "'");
            }
        }
    };

    for (const auto& [id, step] : def.steps) {
        const std::string where = "step " + id;
        const bool terminal = def.is_terminal(id);
        check_mutations(step.mutations, where);

        if (step.prompt.empty()) defects.push_back(where + ": empty prompt");
        if (terminal && !step.transitions.empty()) defects.push_back(where + ": terminal step has transitions");
        if (!terminal && step.transitions.empty()) defects.push_back(where + ": no outgoing transition");

        const bool needs_explanation = step.kind == StepKind::ExplanationCard || step.kind == StepKind::Consequence;
        if (needs_explanation &&
            (!step.explanation || step.explanation->intent.empty() || step.explanation->prevention.empty())) {
            defects.push_back(where + ": " + std::string(to_string(step.kind)) +
                              " step needs an explanation with intent and prevention");
        }
        if (step.kind == StepKind::Choice && !terminal && step.transitions.size() < 2) {
            defects.push_back(where + ": choice step needs at least 2 options");
        }
        if ((step.kind == StepKind::TextInput || step.kind == StepKind::CommandInput) && step.hint.empty()) {
            defects.push_back(where + ": input step needs a retry hint");
        }

        std::set<int> indices;
        for (std::size_t i = 0; i < step.transitions.size(); ++i) {
            const auto& tr = step.transitions[i];
            const std::string tw = where + " transition " + std::to_string(i);
            if (!def.steps.contains(tr.next)) defects.push_back(tw + ": transition to unknown step " + tr.next);
            check_mutations(tr.mutations, tw);

            using K = Matcher::Kind;
            const auto mk = tr.matcher.kind;
            switch (expected_input(step.kind)) {
                case InputKind::Choice:
                    if (mk != K::ChoiceIndex) {
                        defects.push_back(tw + ": " + std::string(to_string(step.kind)) + " steps take choice matchers");
                    } else if (tr.matcher.choice < 0 || !indices.insert(tr.matcher.choice).second) {
                        defects.push_back(tw + ": choice index must be unique and non-negative");
                    } else if (tr.matcher.label.empty()) {
                        defects.push_back(tw + ": choice needs a label");
                    }
                    break;
                case InputKind::Text:
                    if (mk != K::Keywords && mk != K::Regex) defects.push_back(tw + ": text steps take keyword or regex matchers");
                    break;
                case InputKind::Command:
                    if (mk != K::Command) defects.push_back(tw + ": command steps take command matchers");
                    break;
            }
        }
    }

    const auto reached = reachable_steps(def);
    for (const auto& [id, _] : def.steps) {
        if (!reached.contains(id)) defects.push_back("unreachable step: " + id);
    }
    return defects;
}

ScenarioDefinition load_scenario(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(document, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorCode::ParseError,
                    "parse error at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
    auto def = scenario_from_json(doc);
    auto defects = validate_scenario(def);
    if (!defects.empty()) {
        throw Error(ErrorCode::ValidationError,
                    "scenario " + def.id + " has " + std::to_string(defects.size()) + " defect(s)",
                    std::move(defects));
    }
    return def;
}

ScenarioDefinition load_scenario_file(const std::string& path) {
    const auto text = read_file(path);
    try {
        return load_scenario(text);
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what(), e.details());
    }
}

std::vector<std::string> cross_check(const ScenarioDefinition& def, const WorldState& world) {
    std::vector<std::string> defects;
    auto check = [&](const Mutation& m, const std::string& where) {
        auto arg = [&](const char* key) -> const std::string* {
            auto it = m.args.find(key);
            if (it == m.args.end() || it->second.find("$input") != std::string::npos) return nullptr;
            return &it->second;
        };
        if (const auto* p = arg("prop"); p && !find_prop(world, *p)) {
            defects.push_back(where + ": unknown prop " + *p);
        }
        if (const auto* l = arg("listing")) {
            const bool found = std::any_of(world.darknet.begin(), world.darknet.end(),
                                           [&](const DarknetListing& d) { return d.id == *l; });
            if (!found) defects.push_back(where + ": unknown listing " + *l);
        }
        if (const auto* h = arg("host"); h && !find_host(world, *h)) defects.push_back(where + ": unknown host " + *h);
        if (const auto* t = arg("template"); t && std::none_of(world.templates.begin(), world.templates.end(),
                                                               [&](const PhishingTemplate& x) { return x.id == *t; })) {
            defects.push_back(where + ": unknown template " + *t);
        }
        if (const auto* x = arg("exploit"); x && std::none_of(world.exploits.begin(), world.exploits.end(),
                                                              [&](const ExploitCatalogEntry& e) { return e.name == *x; })) {
            defects.push_back(where + ": unknown exploit " + *x);
        }
        if (const auto* p = arg("payload"); p && !payload_from_string(*p)) {
            defects.push_back(where + ": unknown payload " + *p);
        }
    };
    for (const auto& [id, step] : def.steps) {
        for (const auto& m : step.mutations) check(m, def.id + "." + id);
        for (const auto& t : step.transitions) {
            for (const auto& m : t.mutations) check(m, def.id + "." + id + " -> " + t.next);
        }
    }
    return defects;
}

std::map<SkillTag, std::vector<std::string>> skill_coverage(const std::vector<ScenarioDefinition>& defs) {
    std::map<SkillTag, std::vector<std::string>> coverage;
    for (auto skill : kAllSkills) coverage[skill];
    for (const auto& def : defs) {
        for (auto skill : def.skills) {
            auto& ids = coverage[skill];
            if (std::find(ids.begin(), ids.end(), def.id) == ids.end()) ids.push_back(def.id);
        }
    }
    for (auto& [_, ids] : coverage) std::sort(ids.begin(), ids.end());
    return coverage;
}

const ScenarioDefinition* Catalog::find(std::string_view id) const {
    auto it = scenarios.find(std::string(id));
    return it == scenarios.end() ? nullptr : &it->second;
}

std::vector<ScenarioDefinition> Catalog::all() const {
    std::vector<ScenarioDefinition> out;
    for (const auto& [_, def] : scenarios) out.push_back(def);
    return out;
}

Catalog load_catalog(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".scenario") files.push_back(entry.path());
    }
    if (ec) throw Error(ErrorCode::IoError, "cannot read scenario directory " + dir);
    std::sort(files.begin(), files.end());
    Catalog catalog;
    for (const auto& f : files) {
        auto def = load_scenario_file(f.string());
        const std::string id = def.id;
        if (!catalog.scenarios.emplace(id, std::move(def)).second) {
            throw Error(ErrorCode::ValidationError, "duplicate scenario id " + id + " in " + f.string());
        }
    }
    return catalog;
}

}  // namespace getin
