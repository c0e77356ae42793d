#include "getin/content.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>
#include <random>

namespace getin {

// ---------------------------------------------------------------------------
// Phishing kit

const PhishingTemplate* find_template(const WorldState& world, std::string_view id) {
    for (const auto& t : world.templates) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

PhishingCampaign select_template(const PhishingCampaign& campaign, const WorldState& world,
                                 std::string_view template_id) {
    const auto* tmpl = find_template(world, template_id);
    if (!tmpl) {
        throw Error(ErrorCode::InvalidArgument, "no phishing template '" + std::string(template_id) + "'");
    }
    PhishingCampaign next = campaign;
    next.template_id = tmpl->id;
    next.principle = tmpl->principle;
    return next;
}

std::pair<PhishingCampaign, VictimReaction> send_phish(const PhishingCampaign& campaign,
                                                       const WorldState& world,
                                                       const std::set<std::string>& recon_emails,
                                                       const VictimModel& victim) {
    if (campaign.template_id.empty()) {
        throw Error(ErrorCode::TemplateNotSelected, "select a template before sending");
    }
    const auto* tmpl = find_template(world, campaign.template_id);
    if (!tmpl) throw Error(ErrorCode::TemplateNotSelected, "template " + campaign.template_id + " is gone");
    const auto* account = find_email_account(world, campaign.target_email);
    if (!account) {
        throw Error(ErrorCode::UnknownTarget, "no mailbox answers at " + campaign.target_email);
    }

    PhishingCampaign next = campaign;
    next.sent = true;
    next.captured.reset();

    bool falls = tmpl->principle == InfluencePrinciple::Urgency &&
                 recon_emails.contains(campaign.target_email);
    if (falls && victim.probabilistic) {
        std::mt19937_64 rng(victim.seed ^ std::hash<std::string>{}(campaign.target_email));
        falls = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < victim.susceptibility;
    }

    VictimReaction reaction;
    if (falls) {
        reaction.submitted = true;
        reaction.credentials = account->credentials;
        next.captured = account->credentials;
    }
    return {std::move(next), reaction};
}

// ---------------------------------------------------------------------------
// WHERE-clause evaluator: string equality, AND, OR, parentheses, '...' literals.

namespace {

enum class Tok { LParen, RParen, Eq, And, Or, String, Ident };

struct Token {
    Tok kind;
    std::string text;
};

std::optional<std::vector<Token>> lex_clause(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            out.push_back({Tok::LParen, "("});
            ++i;
        } else if (c == ')') {
            out.push_back({Tok::RParen, ")"});
            ++i;
        } else if (c == '=') {
            out.push_back({Tok::Eq, "="});
            ++i;
        } else if (c == '\'') {
            std::string lit;
            ++i;
            bool closed = false;
            while (i < s.size()) {
                if (s[i] == '\'') {
                    if (i + 1 < s.size() && s[i + 1] == '\'') {
                        lit.push_back('\'');
                        i += 2;
                        continue;
                    }
                    closed = true;
                    ++i;
                    break;
                }
                lit.push_back(s[i++]);
            }
            if (!closed) return std::nullopt;
            out.push_back({Tok::String, std::move(lit)});
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
                word.push_back(s[i++]);
            }
            const std::string lower = to_lower(word);
            if (lower == "and") {
                out.push_back({Tok::And, word});
            } else if (lower == "or") {
                out.push_back({Tok::Or, word});
            } else {
                out.push_back({Tok::Ident, std::move(word)});
            }
        } else {
            return std::nullopt;
        }
    }
    return out;
}

struct Node {
    enum class Kind { Or, And, Eq } kind;
    std::unique_ptr<Node> lhs, rhs;
    Token left, right;  // operands for Eq
};

class ClauseParser {
public:
    explicit ClauseParser(const std::vector<Token>& toks) : toks_(toks) {}

    std::unique_ptr<Node> parse() {
        auto node = expr();
        if (!node || pos_ != toks_.size()) return nullptr;
        return node;
    }

private:
    bool at(Tok k) const { return pos_ < toks_.size() && toks_[pos_].kind == k; }

    std::unique_ptr<Node> expr() {
        auto left = term();
        while (left && at(Tok::Or)) {
            ++pos_;
            auto right = term();
            if (!right) return nullptr;
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::Or;
            n->lhs = std::move(left);
            n->rhs = std::move(right);
            left = std::move(n);
        }
        return left;
    }

    std::unique_ptr<Node> term() {
        auto left = factor();
        while (left && at(Tok::And)) {
            ++pos_;
            auto right = factor();
            if (!right) return nullptr;
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::And;
            n->lhs = std::move(left);
            n->rhs = std::move(right);
            left = std::move(n);
        }
        return left;
    }

    std::unique_ptr<Node> factor() {
        // Guard recursion depth against inputs made of thousands of '('.
        if (++depth_ > 256) return nullptr;
        std::unique_ptr<Node> result;
        if (at(Tok::LParen)) {
            ++pos_;
            result = expr();
            if (!result || !at(Tok::RParen)) return nullptr;
            ++pos_;
        } else {
            if (!(at(Tok::String) || at(Tok::Ident))) return nullptr;
            Token left = toks_[pos_++];
            if (!at(Tok::Eq)) return nullptr;
            ++pos_;
            if (!(at(Tok::String) || at(Tok::Ident))) return nullptr;
            Token right = toks_[pos_++];
            result = std::make_unique<Node>();
            result->kind = Node::Kind::Eq;
            result->left = std::move(left);
            result->right = std::move(right);
        }
        --depth_;
        return result;
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

std::optional<std::string> operand_value(const Token& t, const std::map<std::string, std::string>& row) {
    if (t.kind == Tok::String) return t.text;
    auto it = row.find(t.text);
    if (it == row.end()) return std::nullopt;
    return it->second;
}

std::optional<bool> eval_node(const Node& n, const std::map<std::string, std::string>& row) {
    switch (n.kind) {
        case Node::Kind::Eq: {
            auto a = operand_value(n.left, row);
            auto b = operand_value(n.right, row);
            if (!a || !b) return std::nullopt;
            return *a == *b;
        }
        case Node::Kind::And: {
            auto a = eval_node(*n.lhs, row);
            auto b = eval_node(*n.rhs, row);
            if (!a || !b) return std::nullopt;
            return *a && *b;
        }
        case Node::Kind::Or: {
            auto a = eval_node(*n.lhs, row);
            auto b = eval_node(*n.rhs, row);
            if (!a || !b) return std::nullopt;
            return *a || *b;
        }
    }
    return std::nullopt;
}

bool references_columns(const Node& n) {
    if (n.kind == Node::Kind::Eq) return n.left.kind == Tok::Ident || n.right.kind == Tok::Ident;
    return references_columns(*n.lhs) || references_columns(*n.rhs);
}

std::unique_ptr<Node> parse_clause(std::string_view clause) {
    auto toks = lex_clause(clause);
    if (!toks) return nullptr;
    return ClauseParser(*toks).parse();
}

}  // namespace

std::string substitute_login(const LoginGate& gate, std::string_view user, std::string_view pass) {
    // Substitute both slots against the original template so that a slot
    // marker typed by the player is never expanded.
    const auto& t = gate.query_template;
    const auto upos = t.find("{user}");
    const auto ppos = t.find("{pass}");
    if (upos == std::string::npos || ppos == std::string::npos) return t;
    std::string out;
    if (upos < ppos) {
        out = t.substr(0, upos) + std::string(user) + t.substr(upos + 6, ppos - upos - 6) +
              std::string(pass) + t.substr(ppos + 6);
    } else {
        out = t.substr(0, ppos) + std::string(pass) + t.substr(ppos + 6, upos - ppos - 6) +
              std::string(user) + t.substr(upos + 6);
    }
    return out;
}

std::optional<bool> evaluate_where(std::string_view clause, const std::map<std::string, std::string>& row) {
    auto tree = parse_clause(clause);
    if (!tree) return std::nullopt;
    return eval_node(*tree, row);
}

LoginEvaluation evaluate_login(const LoginGate& gate, std::string_view user_input, std::string_view pass_input) {
    LoginEvaluation result;
    if (user_input.size() > kMaxLoginInput || pass_input.size() > kMaxLoginInput) {
        result.malformed = true;
        result.diagnostic = "input exceeds 4 KiB";
        return result;
    }
    result.clause = substitute_login(gate, user_input, pass_input);
    auto tree = parse_clause(result.clause);
    if (!tree) {
        result.malformed = true;
        result.diagnostic = "query syntax error";
        return result;
    }
    if (!references_columns(*tree)) {
        const auto value = eval_node(*tree, {});
        result.tautology = value.value_or(false);
    }
    bool satisfied = result.tautology;
    for (const auto& user : gate.users) {
        if (satisfied) break;
        const std::map<std::string, std::string> row{{gate.user_field, user.username},
                                                     {gate.pass_field, user.password}};
        const auto value = eval_node(*tree, row);
        if (!value) {
            result.malformed = true;
            result.diagnostic = "query references an unknown column";
            return result;
        }
        satisfied = *value;
    }
    result.outcome = satisfied ? LoginOutcome::Accepted : LoginOutcome::Rejected;
    return result;
}

// ---------------------------------------------------------------------------
// Exploit framework

const ExploitCatalogEntry* find_exploit(const std::vector<ExploitCatalogEntry>& catalog,
                                        std::string_view name) {
    for (const auto& e : catalog) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

ConfiguredExploit configure_exploit(const std::vector<ExploitCatalogEntry>& catalog, std::string_view name,
                                    const std::map<std::string, std::string>& options) {
    const auto* entry = find_exploit(catalog, name);
    if (!entry) throw Error(ErrorCode::UnknownExploit, "no exploit named '" + std::string(name) + "'");

    ConfiguredExploit configured;
    configured.name = entry->name;
    for (const auto& [k, v] : options) {
        std::string up = k;
        std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
        configured.options[up] = v;
    }

    std::vector<std::string> missing;
    for (const auto& key : entry->required_options) {
        auto it = configured.options.find(key);
        if (it == configured.options.end() || it->second.empty()) missing.push_back(key);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw Error(ErrorCode::MissingOption, "missing required options: " + list, missing);
    }
    configured.target = configured.options.at("TARGET");
    configured.payload = configured.options.at("PAYLOAD");
    if (std::find(entry->payloads.begin(), entry->payloads.end(), configured.payload) == entry->payloads.end()) {
        throw Error(ErrorCode::InvalidPayload,
                    "payload '" + configured.payload + "' is not available for " + entry->name);
    }
    return configured;
}

ExploitOutcome run_exploit(const ConfiguredExploit& configured, const WorldState& world) {
    const auto* host = find_host(world, configured.target);
    if (!host) throw Error(ErrorCode::UnknownHost, "no host at " + configured.target);
    const auto* entry = find_exploit(world.exploits, configured.name);
    if (!entry) throw Error(ErrorCode::UnknownExploit, "no exploit named '" + configured.name + "'");

    const std::set<std::string> applicable(entry->vulnerability_ids.begin(), entry->vulnerability_ids.end());
    const bool vulnerable = std::any_of(host->services.begin(), host->services.end(), [&](const Service& s) {
        return std::any_of(s.vulnerability_ids.begin(), s.vulnerability_ids.end(),
                           [&](const std::string& v) { return applicable.contains(v); });
    });

    ExploitOutcome outcome;
    if (vulnerable) {
        outcome.session_opened = true;
        outcome.session = RemoteSession{host->address, true, {}};
    } else {
        outcome.failure = "NotVulnerable";
    }
    return outcome;
}

RemoteSession download_file(const RemoteSession& session, const WorldState& world, std::string_view path) {
    if (!session.open) throw Error(ErrorCode::InvalidArgument, "no open remote session");
    const auto* host = find_host(world, session.host);
    if (!host) throw Error(ErrorCode::UnknownHost, "no host at " + session.host);
    const auto node = fs_navigate(*host, path);
    if (node.kind != NodeKind::File) throw Error(ErrorCode::IsADirectory, node.path + " is a directory");
    RemoteSession next = session;
    next.downloads.push_back(node.path);
    return next;
}

// ---------------------------------------------------------------------------
// Bad USB

Prop flash_usb(const Prop& prop, Payload payload, const std::vector<std::string>& inventory) {
    if (prop.state != PropState::Found) {
        throw Error(ErrorCode::PropNotFound, "the USB stick has not been found yet");
    }
    if (payload == Payload::None) throw Error(ErrorCode::InvalidArgument, "choose a payload to flash");
    if (payload == Payload::ZeroDay &&
        std::find(inventory.begin(), inventory.end(), kZeroDayItem) == inventory.end()) {
        throw Error(ErrorCode::ZeroDayNotOwned, "you do not own a zero-day exploit yet");
    }
    Prop next = prop;
    next.payload = payload;
    return next;
}

std::vector<std::string> simulate_payload(Payload payload) {
    switch (payload) {
        case Payload::WordPrankScript:
            return std::vector<std::string>(5, "open word-processor");
        case Payload::ZeroDay:
            return {"exploit unpatched driver", "open reverse shell to attacker"};
        case Payload::None:
            break;
    }
    return {};
}

Prop label_usb(const Prop& prop, std::string_view label) {
    if (prop.payload == Payload::None) throw Error(ErrorCode::NotFlashed, "flash the stick before labeling it");
    Prop next = prop;
    next.label = std::string(label);
    return next;
}

}  // namespace getin
