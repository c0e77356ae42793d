#pragma once

#include "getin/util.hpp"

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
// Social media, email, breach corpus
// ---------------------------------------------------------------------------

enum class FactKind { BusinessEmail, Employer, Interest };

struct Fact {
    FactKind kind = FactKind::Interest;
    std::string value;
    bool operator==(const Fact&) const = default;
};

struct Post {
    std::string text;
    std::vector<Fact> facts;
    bool operator==(const Post&) const = default;
};

struct SocialProfile {
    std::string handle;
    std::string display_name;
    std::string employer;
    std::vector<Post> posts;
    bool operator==(const SocialProfile&) const = default;
};

struct Credential {
    std::string username;
    std::string password;
    bool operator==(const Credential&) const = default;
};

// An empty credential list means "breached, no plaintext leaked".
struct BreachDatabase {
    std::map<std::string, std::vector<Credential>> entries;
    bool operator==(const BreachDatabase&) const = default;
};

struct EmailAccount {
    std::string address;
    std::string owner;        // profile handle, may be empty
    std::string service;      // what the stored login belongs to, e.g. "facebook"
    Credential credentials;
    bool operator==(const EmailAccount&) const = default;
};

// ---------------------------------------------------------------------------
// Target network
// ---------------------------------------------------------------------------

enum class NodeKind { Directory, File };
enum class Sensitivity { None, Sensitive };

struct FileSystemNode {
    std::string name;
    NodeKind kind = NodeKind::Directory;
    std::string contents;
    Sensitivity sensitivity = Sensitivity::None;
    std::vector<FileSystemNode> children;
    bool operator==(const FileSystemNode&) const = default;
};

struct Service {
    int port = 0;
    std::string name;
    std::string version;
    std::vector<std::string> vulnerability_ids;
    bool operator==(const Service&) const = default;
};

struct NetworkHost {
    std::string address;
    std::string hostname;
    std::vector<Service> services;
    FileSystemNode filesystem;
    bool operator==(const NetworkHost&) const = default;
};

// ---------------------------------------------------------------------------
// Darknet market, wallet, physical props
// ---------------------------------------------------------------------------

enum class ListingKind { ZeroDayExploit, Malware, Other };

struct DarknetListing {
    std::string id;
    std::string title;
    ListingKind kind = ListingKind::Other;
    std::int64_t price = 0;
    std::string description;
    bool operator==(const DarknetListing&) const = default;
};

struct CryptoWallet {
    std::int64_t balance = 0;
    bool operator==(const CryptoWallet&) const = default;
};

enum class PropState { Hidden, Found, Used };
enum class Payload { None, ZeroDay, WordPrankScript };

struct Prop {
    std::string id;
    std::string label;
    PropState state = PropState::Hidden;
    Payload payload = Payload::None;
    bool operator==(const Prop&) const = default;
};

// ---------------------------------------------------------------------------
// Scenario-content sections that live in the world file
// ---------------------------------------------------------------------------

enum class InfluencePrinciple {
    Authority,
    Intimidation,
    ConsensusSocialProof,
    Scarcity,
    Urgency,
    FamiliarityLiking,
};

inline constexpr std::size_t kInfluencePrincipleCount = 6;

struct PhishingTemplate {
    std::string id;
    InfluencePrinciple principle = InfluencePrinciple::Urgency;
    std::string impersonates;
    std::string sender;
    std::string subject;
    std::string body;
    bool operator==(const PhishingTemplate&) const = default;
};

struct ExploitCatalogEntry {
    std::string name;
    std::string description;
    std::set<std::string> required_options;
    std::vector<std::string> vulnerability_ids;
    std::vector<std::string> payloads;
    bool operator==(const ExploitCatalogEntry&) const = default;
};

// A login form backed by a WHERE-clause template with `{user}` and `{pass}`
// slots, evaluated against a small user table.
struct LoginGate {
    std::string host;
    std::string user_field = "username";
    std::string pass_field = "password";
    std::string query_template;
    std::vector<Credential> users;
    bool operator==(const LoginGate&) const = default;
};

// ---------------------------------------------------------------------------

struct WorldState {
    std::vector<SocialProfile> social_profiles;
    BreachDatabase breach_db;
    std::vector<EmailAccount> email_accounts;
    std::vector<DarknetListing> darknet;
    std::vector<NetworkHost> network;
    std::vector<Prop> props;
    CryptoWallet wallet;
    std::vector<ExploitCatalogEntry> exploits;
    std::vector<PhishingTemplate> templates;
    std::optional<LoginGate> login_gate;
    std::set<std::string> flags;
    bool operator==(const WorldState&) const = default;
};

// The simulated address block: 10.13.37.0/28, hosts .1 to .14.
inline constexpr std::string_view kSimulatedRange = "10.13.37.0/28";

// ---------------------------------------------------------------------------
// Serialization and validation
// ---------------------------------------------------------------------------

// Parses a world document. With `strict`, unknown keys anywhere are rejected.
WorldState world_from_json(const json& document, bool strict = true);
WorldState load_world_file(const std::string& path, bool strict = true);
json to_json(const WorldState& world);

// Lists every violated invariant; empty means valid.
std::vector<std::string> validate_world(const WorldState& world);

std::string_view to_string(FactKind kind);
std::string_view to_string(ListingKind kind);
std::string_view to_string(PropState state);
std::string_view to_string(Payload payload);
std::string_view to_string(InfluencePrinciple principle);
std::optional<Payload> payload_from_string(std::string_view text);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct SearchHit {
    SocialProfile profile;
    std::vector<Post> matching_posts;
};

// A profile matching on handle, display name or employer shows all of its
// posts; a profile matching only through post text shows those posts.
std::vector<SearchHit> search_social_media(const WorldState& world, std::string_view query);

bool is_valid_email(std::string_view email);

struct BreachResult {
    bool breached = false;
    std::vector<Credential> credentials;
};

BreachResult check_breach(const WorldState& world, std::string_view email);

struct ScanHost {
    std::string address;
    std::string hostname;
    std::vector<Service> services;
    bool operator==(const ScanHost&) const = default;
};

struct ScanReport {
    std::vector<ScanHost> hosts;
    bool operator==(const ScanReport&) const = default;
};

// Accepts one address inside the simulated range or the range itself.
ScanReport scan_network(const WorldState& world, std::string_view target_spec);

// Numeric dotted-quad parse; nullopt if malformed.
std::optional<std::uint32_t> parse_ipv4(std::string_view text);
bool in_simulated_range(std::string_view address);

struct Receipt {
    std::string listing_id;
    std::int64_t price = 0;
    ListingKind kind = ListingKind::Other;
    bool operator==(const Receipt&) const = default;
};

std::pair<WorldState, Receipt> purchase_listing(const WorldState& world, std::string_view listing_id);

struct DirectoryEntry {
    std::string name;
    NodeKind kind = NodeKind::File;
    bool sensitive = false;
};

struct FsResult {
    std::string path;  // normalized absolute path
    NodeKind kind = NodeKind::Directory;
    std::vector<DirectoryEntry> entries;  // directories, sorted by name
    std::string contents;                 // files
    bool sensitive = false;
};

// Joins `path` onto `cwd` and folds "." and ".." segments.
std::string resolve_path(std::string_view cwd, std::string_view path);

FsResult fs_navigate(const NetworkHost& host, std::string_view path);

const NetworkHost* find_host(const WorldState& world, std::string_view address);
const Prop* find_prop(const WorldState& world, std::string_view id);
const EmailAccount* find_email_account(const WorldState& world, std::string_view address);

// Hidden -> Found and Found -> Used; any other move throws.
WorldState reveal_prop(const WorldState& world, std::string_view prop_id);
WorldState use_prop(const WorldState& world, std::string_view prop_id);

}  // namespace getin
