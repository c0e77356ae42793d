#pragma once

// Reference implementations used only by tests. Each one is written
// separately from the production code it checks.

#include "getin/engine.hpp"
#include "getin/survey.hpp"
#include "getin/world.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Login decision for a clause template with {user} and {pass} slots.
struct LoginVerdict {
    bool accepted = false;
    bool malformed = false;
};

// Small validating tokenizer + RPN evaluator over one substituted clause.
LoginVerdict login(const std::string& query_template, const std::string& user_field,
                   const std::string& pass_field, const std::vector<getin::Credential>& users,
                   const std::string& user_input, const std::string& pass_input);

// Exploits whose ids intersect some service vulnerability of the host.
bool exploit_opens(const getin::ExploitCatalogEntry& exploit, const getin::NetworkHost& host);

// Transitive closure from `entry` over an adjacency list.
std::set<std::string> closure(const std::map<std::string, std::vector<std::string>>& edges,
                              const std::string& entry);

// Brute-force tally: question -> dumped answer -> count.
std::map<std::string, std::map<std::string, std::size_t>> tally(const std::vector<getin::SurveyResponse>& responses);

std::set<std::string> token_intersection(const std::vector<getin::SurveyResponse>& a,
                                         const std::vector<getin::SurveyResponse>& b);

// The fixed category assignment of the shipped content.
std::map<getin::SkillTag, std::vector<std::string>> expected_coverage();

// The four published question captions.
const std::vector<std::string>& published_questions();

}  // namespace oracle
