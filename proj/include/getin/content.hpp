#pragma once

#include "getin/world.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace getin {

// ---------------------------------------------------------------------------
// Phishing kit
// ---------------------------------------------------------------------------

struct PhishingCampaign {
    std::string template_id;
    std::optional<InfluencePrinciple> principle;
    std::string target_email;
    bool sent = false;
    std::optional<Credential> captured;  // only ever set when sent
    bool operator==(const PhishingCampaign&) const = default;
};

struct VictimReaction {
    bool submitted = false;
    Credential credentials;
};

// The shipped victim falls for every urgency lure aimed at an address the
// attacker found during recon. The probabilistic hook is off by default.
struct VictimModel {
    bool probabilistic = false;
    double susceptibility = 1.0;
    std::uint64_t seed = 0;
};

const PhishingTemplate* find_template(const WorldState& world, std::string_view id);

// Returns the campaign with the template applied; unknown ids throw
// InvalidArgument.
PhishingCampaign select_template(const PhishingCampaign& campaign, const WorldState& world,
                                 std::string_view template_id);

std::pair<PhishingCampaign, VictimReaction> send_phish(const PhishingCampaign& campaign,
                                                       const WorldState& world,
                                                       const std::set<std::string>& recon_emails,
                                                       const VictimModel& victim = {});

// ---------------------------------------------------------------------------
// Login form with an injectable WHERE clause
// ---------------------------------------------------------------------------

enum class LoginOutcome { Accepted, Rejected };

struct LoginEvaluation {
    LoginOutcome outcome = LoginOutcome::Rejected;
    std::string clause;     // the substituted WHERE clause
    bool malformed = false;  // clause did not parse
    bool tautology = false;  // true without consulting any row
    std::string diagnostic;
};

inline constexpr std::size_t kMaxLoginInput = 4096;

std::string substitute_login(const LoginGate& gate, std::string_view user, std::string_view pass);

// Parses the clause and evaluates it against one row (column name -> value).
// nullopt when the clause is malformed or names an unknown column.
std::optional<bool> evaluate_where(std::string_view clause,
                                   const std::map<std::string, std::string>& row);

// Total. Accepted iff the substituted clause holds for some stored user or is
// true on its own.
LoginEvaluation evaluate_login(const LoginGate& gate, std::string_view user_input,
                               std::string_view pass_input);

// ---------------------------------------------------------------------------
// Exploit framework
// ---------------------------------------------------------------------------

struct ConfiguredExploit {
    std::string name;
    std::map<std::string, std::string> options;  // keys uppercased
    std::string target;
    std::string payload;
    bool operator==(const ConfiguredExploit&) const = default;
};

const ExploitCatalogEntry* find_exploit(const std::vector<ExploitCatalogEntry>& catalog,
                                        std::string_view name);

// Throws UnknownExploit, MissingOption (details = every missing key) or
// InvalidPayload.
ConfiguredExploit configure_exploit(const std::vector<ExploitCatalogEntry>& catalog,
                                    std::string_view name,
                                    const std::map<std::string, std::string>& options);

struct RemoteSession {
    std::string host;
    bool open = false;
    std::vector<std::string> downloads;
    bool operator==(const RemoteSession&) const = default;
};

struct ExploitOutcome {
    bool session_opened = false;
    RemoteSession session;
    std::string failure;  // "NotVulnerable" when the host offers nothing the exploit targets
};

ExploitOutcome run_exploit(const ConfiguredExploit& configured, const WorldState& world);

// Requires an open session and an existing file on its host.
RemoteSession download_file(const RemoteSession& session, const WorldState& world, std::string_view path);

// ---------------------------------------------------------------------------
// Bad USB
// ---------------------------------------------------------------------------

inline constexpr std::string_view kZeroDayItem = "zero-day";

Prop flash_usb(const Prop& prop, Payload payload, const std::vector<std::string>& inventory);

// What the stick does once plugged in.
std::vector<std::string> simulate_payload(Payload payload);

Prop label_usb(const Prop& prop, std::string_view label);

}  // namespace getin
