#include "oracles.hpp"

#include <cctype>
#include <deque>

namespace oracle {

namespace {

enum class K { Open, Close, Eq, And, Or, Lit, Col };

struct T {
    K k;
    std::string s;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Returns false on any character the dialect does not know.
bool scan(const std::string& text, std::vector<T>& out) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) { ++i; continue; }
        if (c == '(') { out.push_back({K::Open, {}}); ++i; continue; }
        if (c == ')') { out.push_back({K::Close, {}}); ++i; continue; }
        if (c == '=') { out.push_back({K::Eq, {}}); ++i; continue; }
        if (c == '\'') {
            std::string v;
            std::size_t j = i + 1;
            for (;;) {
                if (j >= n) return false;
                if (text[j] != '\'') { v += text[j++]; continue; }
                if (j + 1 < n && text[j + 1] == '\'') { v += '\''; j += 2; continue; }
                break;
            }
            out.push_back({K::Lit, v});
            i = j + 1;
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < n && word_char(text[j])) ++j;
            std::string w = text.substr(i, j - i);
            const auto lw = lower(w);
            if (lw == "and") out.push_back({K::And, {}});
            else if (lw == "or") out.push_back({K::Or, {}});
            else out.push_back({K::Col, w});
            i = j;
            continue;
        }
        return false;
    }
    return true;
}

// RPN items: a comparison index, or an operator.
struct Item {
    enum { Cmp, AndOp, OrOp } what;
    std::size_t cmp = 0;
};

struct Cmp {
    T a, b;
};

// Grammar check by a 4-state machine, then shunting-yard.
bool compile(const std::vector<T>& toks, std::vector<Cmp>& cmps, std::vector<Item>& rpn) {
    enum { WantFactor, WantEq, WantRhs, AfterFactor } st = WantFactor;
    int depth = 0;
    std::vector<K> ops;
    auto prec = [](K k) { return k == K::And ? 2 : 1; };
    auto emit = [&](K k) { rpn.push_back({k == K::And ? Item::AndOp : Item::OrOp}); };
    T lhs{};
    for (const auto& t : toks) {
        switch (st) {
            case WantFactor:
                if (t.k == K::Open) {
                    ++depth;
                    // The production parser refuses nesting this deep.
                    if (depth >= 256) return false;
                    ops.push_back(K::Open);
                } else if (t.k == K::Lit || t.k == K::Col) {
                    lhs = t;
                    st = WantEq;
                } else {
                    return false;
                }
                break;
            case WantEq:
                if (t.k != K::Eq) return false;
                st = WantRhs;
                break;
            case WantRhs:
                if (t.k != K::Lit && t.k != K::Col) return false;
                cmps.push_back({lhs, t});
                rpn.push_back({Item::Cmp, cmps.size() - 1});
                st = AfterFactor;
                break;
            case AfterFactor:
                if (t.k == K::And || t.k == K::Or) {
                    while (!ops.empty() && ops.back() != K::Open && prec(ops.back()) >= prec(t.k)) {
                        emit(ops.back());
                        ops.pop_back();
                    }
                    ops.push_back(t.k);
                    st = WantFactor;
                } else if (t.k == K::Close) {
                    if (depth == 0) return false;
                    --depth;
                    while (ops.back() != K::Open) {
                        emit(ops.back());
                        ops.pop_back();
                    }
                    ops.pop_back();
                } else {
                    return false;
                }
                break;
        }
    }
    if (st != AfterFactor || depth != 0) return false;
    while (!ops.empty()) {
        emit(ops.back());
        ops.pop_back();
    }
    return true;
}

std::optional<bool> run(const std::vector<Cmp>& cmps, const std::vector<Item>& rpn,
                        const std::map<std::string, std::string>& row) {
    std::vector<bool> stack;
    for (const auto& it : rpn) {
        if (it.what == Item::Cmp) {
            const auto& c = cmps[it.cmp];
            auto val = [&](const T& t) -> std::optional<std::string> {
                if (t.k == K::Lit) return t.s;
                auto f = row.find(t.s);
                if (f == row.end()) return std::nullopt;
                return f->second;
            };
            auto a = val(c.a), b = val(c.b);
            if (!a || !b) return std::nullopt;
            stack.push_back(*a == *b);
        } else {
            const bool y = stack.back();
            stack.pop_back();
            const bool x = stack.back();
            stack.pop_back();
            stack.push_back(it.what == Item::AndOp ? (x && y) : (x || y));
        }
    }
    return stack.back();
}

std::string fill(const std::string& tmpl, const std::string& user, const std::string& pass) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size();) {
        if (tmpl.compare(i, 6, "{user}") == 0) {
            out += user;
            i += 6;
        } else if (tmpl.compare(i, 6, "{pass}") == 0) {
            out += pass;
            i += 6;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

}  // namespace

LoginVerdict login(const std::string& query_template, const std::string& user_field, const std::string& pass_field,
                   const std::vector<getin::Credential>& users, const std::string& user_input,
                   const std::string& pass_input) {
    LoginVerdict v;
    if (user_input.size() > 4096 || pass_input.size() > 4096) {
        v.malformed = true;
        return v;
    }
    std::vector<T> toks;
    std::vector<Cmp> cmps;
    std::vector<Item> rpn;
    if (!scan(fill(query_template, user_input, pass_input), toks) || !compile(toks, cmps, rpn)) {
        v.malformed = true;
        return v;
    }
    bool has_column = false;
    for (const auto& c : cmps) has_column = has_column || c.a.k == K::Col || c.b.k == K::Col;
    if (!has_column) {
        v.accepted = run(cmps, rpn, {}).value_or(false);
        if (v.accepted) return v;
    }
    for (const auto& u : users) {
        const auto r = run(cmps, rpn, {{user_field, u.username}, {pass_field, u.password}});
        if (!r) {
            v.malformed = true;
            return v;
        }
        if (*r) {
            v.accepted = true;
            return v;
        }
    }
    return v;
}

bool exploit_opens(const getin::ExploitCatalogEntry& exploit, const getin::NetworkHost& host) {
    std::set<std::string> mine(exploit.vulnerability_ids.begin(), exploit.vulnerability_ids.end());
    std::set<std::string> theirs;
    for (const auto& s : host.services) theirs.insert(s.vulnerability_ids.begin(), s.vulnerability_ids.end());
    for (const auto& id : mine) {
        if (theirs.count(id)) return true;
    }
    return false;
}

std::set<std::string> closure(const std::map<std::string, std::vector<std::string>>& edges,
                              const std::string& entry) {
    // Iterate to a fixed point instead of a queue-based search.
    std::set<std::string> seen;
    if (!edges.count(entry)) return seen;
    seen.insert(entry);
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [from, tos] : edges) {
            if (!seen.count(from)) continue;
            for (const auto& to : tos) {
                if (edges.count(to) && seen.insert(to).second) grew = true;
            }
        }
    }
    return seen;
}

std::map<std::string, std::map<std::string, std::size_t>> tally(const std::vector<getin::SurveyResponse>& responses) {
    std::map<std::string, std::map<std::string, std::size_t>> out;
    for (const auto& r : responses) {
        for (const auto& [q, a] : r.answers) ++out[q][a.dump()];
    }
    return out;
}

std::set<std::string> token_intersection(const std::vector<getin::SurveyResponse>& a,
                                         const std::vector<getin::SurveyResponse>& b) {
    std::set<std::string> left, both;
    for (const auto& r : a) {
        if (r.token) left.insert(*r.token);
    }
    for (const auto& r : b) {
        if (r.token && left.count(*r.token)) both.insert(*r.token);
    }
    return both;
}

std::map<getin::SkillTag, std::vector<std::string>> expected_coverage() {
    using S = getin::SkillTag;
    return {
        {S::MalwareViaPhishing, {"phishing"}},   {S::PiiTheftViaPhishing, {"phishing"}},
        {S::PiiTheftViaWebsites, {"phishing"}},  {S::PiiViaSocialMedia, {"phishing"}},
        {S::PasswordExploitation, {"sqli"}},     {S::MalwareViaWebsites, {"exploit"}},
        {S::UsbExploitation, {"badusb"}},
    };
}

const std::vector<std::string>& published_questions() {
    static const std::vector<std::string> q = {
        "Do you know what a phishing mail is?",
        "Do you know how a phishing attack is rolled out?",
        "Do you know, how a phishing attacker acquires your email address?",
        "Do you think the game \"The get in\" helped you to develop a better understanding about cyber attacks "
        "and cyberrisks?",
    };
    return q;
}

}  // namespace oracle
