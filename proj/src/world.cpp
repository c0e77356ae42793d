#include "getin/world.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

namespace getin {

namespace {

[[noreturn]] void bad(const std::string& what) {
    throw Error(ErrorCode::ParseError, "world: " + what);
}

std::string req_string(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) bad(ctx + ": missing string '" + key + "'");
    return it->get<std::string>();
}

std::string opt_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return {};
    if (!it->is_string()) bad(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

std::int64_t req_int(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) bad(ctx + ": missing integer '" + key + "'");
    return it->get<std::int64_t>();
}

const json& req_array(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) bad(ctx + ": missing array '" + key + "'");
    return *it;
}

std::vector<std::string> string_list(const json& arr, const std::string& ctx) {
    std::vector<std::string> out;
    for (const auto& v : arr) {
        if (!v.is_string()) bad(ctx + ": expected string");
        out.push_back(v.get<std::string>());
    }
    return out;
}

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& text, const std::pair<std::string_view, Enum> (&table)[N],
               const std::string& ctx) {
    for (const auto& [name, value] : table) {
        if (name == text) return value;
    }
    bad(ctx + ": unknown value '" + text + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum value, const std::pair<std::string_view, Enum> (&table)[N]) {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::pair<std::string_view, FactKind> kFactKinds[] = {
    {"business_email", FactKind::BusinessEmail},
    {"employer", FactKind::Employer},
    {"interest", FactKind::Interest},
};

constexpr std::pair<std::string_view, ListingKind> kListingKinds[] = {
    {"zero_day_exploit", ListingKind::ZeroDayExploit},
    {"malware", ListingKind::Malware},
    {"other", ListingKind::Other},
};

constexpr std::pair<std::string_view, PropState> kPropStates[] = {
    {"hidden", PropState::Hidden},
    {"found", PropState::Found},
    {"used", PropState::Used},
};

constexpr std::pair<std::string_view, Payload> kPayloads[] = {
    {"none", Payload::None},
    {"zero-day", Payload::ZeroDay},
    {"word-prank", Payload::WordPrankScript},
};

constexpr std::pair<std::string_view, InfluencePrinciple> kPrinciples[] = {
    {"authority", InfluencePrinciple::Authority},
    {"intimidation", InfluencePrinciple::Intimidation},
    {"consensus", InfluencePrinciple::ConsensusSocialProof},
    {"scarcity", InfluencePrinciple::Scarcity},
    {"urgency", InfluencePrinciple::Urgency},
    {"familiarity", InfluencePrinciple::FamiliarityLiking},
};

Credential credential_from(const json& j, bool strict, const std::string& ctx) {
    check_keys(j, {"username", "password"}, ctx, strict);
    return {req_string(j, "username", ctx), req_string(j, "password", ctx)};
}

json credential_json(const Credential& c) {
    return {{"username", c.username}, {"password", c.password}};
}

FileSystemNode node_from(const json& j, bool strict, const std::string& ctx) {
    check_keys(j, {"name", "type", "contents", "sensitive", "children"}, ctx, strict);
    FileSystemNode node;
    node.name = req_string(j, "name", ctx);
    const std::string type = req_string(j, "type", ctx);
    if (type == "dir") {
        node.kind = NodeKind::Directory;
    } else if (type == "file") {
        node.kind = NodeKind::File;
    } else {
        bad(ctx + ": node type must be 'dir' or 'file'");
    }
    node.contents = opt_string(j, "contents");
    if (auto it = j.find("sensitive"); it != j.end()) {
        if (!it->is_boolean()) bad(ctx + ": 'sensitive' must be boolean");
        node.sensitivity = it->get<bool>() ? Sensitivity::Sensitive : Sensitivity::None;
    }
    if (auto it = j.find("children"); it != j.end()) {
        if (!it->is_array()) bad(ctx + ": 'children' must be an array");
        for (const auto& child : *it) {
            node.children.push_back(node_from(child, strict, ctx + "/" + node.name));
        }
    }
    return node;
}

json node_json(const FileSystemNode& node) {
    json j = {{"name", node.name}, {"type", node.kind == NodeKind::Directory ? "dir" : "file"}};
    if (node.kind == NodeKind::File) j["contents"] = node.contents;
    if (node.sensitivity == Sensitivity::Sensitive) j["sensitive"] = true;
    if (node.kind == NodeKind::Directory) {
        json children = json::array();
        for (const auto& c : node.children) children.push_back(node_json(c));
        j["children"] = std::move(children);
    }
    return j;
}

template <typename T, typename Key>
void check_unique(const std::vector<T>& items, Key key, const std::string& what,
                  std::vector<std::string>& defects) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (!seen.insert(key(item)).second) {
            defects.push_back("duplicate " + what + " '" + key(item) + "'");
        }
    }
}

void check_tree(const FileSystemNode& node, const std::string& path,
                std::vector<std::string>& defects) {
    if (node.kind == NodeKind::Directory) {
        if (!node.contents.empty()) defects.push_back("directory with contents: " + path);
        std::set<std::string> names;
        for (const auto& child : node.children) {
            if (child.name.empty() || child.name.find('/') != std::string::npos ||
                child.name == "." || child.name == "..") {
                defects.push_back("invalid node name under " + path);
            }
            if (!names.insert(child.name).second) {
                defects.push_back("duplicate sibling '" + child.name + "' in " + path);
            }
            check_tree(child, path == "/" ? "/" + child.name : path + "/" + child.name, defects);
        }
    } else if (!node.children.empty()) {
        defects.push_back("file with children: " + path);
    }
}

std::uint32_t range_base() { return *parse_ipv4("10.13.37.0"); }
constexpr int kRangePrefix = 28;

}  // namespace

std::string_view to_string(FactKind kind) { return enum_name(kind, kFactKinds); }
std::string_view to_string(ListingKind kind) { return enum_name(kind, kListingKinds); }
std::string_view to_string(PropState state) { return enum_name(state, kPropStates); }
std::string_view to_string(Payload payload) { return enum_name(payload, kPayloads); }
std::string_view to_string(InfluencePrinciple principle) { return enum_name(principle, kPrinciples); }

std::optional<Payload> payload_from_string(std::string_view text) {
    for (const auto& [name, value] : kPayloads) {
        if (name == text) return value;
    }
    return std::nullopt;
}

WorldState world_from_json(const json& doc, bool strict) {
    check_keys(doc,
               {"profiles", "breaches", "emails", "darknet", "hosts", "props", "wallet", "exploits",
                "templates", "login", "flags"},
               "world", strict);
    WorldState world;

    for (const auto& p : req_array(doc, "profiles", "world")) {
        check_keys(p, {"handle", "display_name", "employer", "posts"}, "profile", strict);
        SocialProfile profile;
        profile.handle = req_string(p, "handle", "profile");
        const std::string ctx = "profile " + profile.handle;
        profile.display_name = req_string(p, "display_name", ctx);
        profile.employer = opt_string(p, "employer");
        if (p.contains("posts")) {
            for (const auto& post_json : req_array(p, "posts", ctx)) {
                check_keys(post_json, {"text", "facts"}, ctx + " post", strict);
                Post post;
                post.text = req_string(post_json, "text", ctx);
                if (post_json.contains("facts")) {
                    for (const auto& f : req_array(post_json, "facts", ctx)) {
                        check_keys(f, {"kind", "value"}, ctx + " fact", strict);
                        post.facts.push_back({enum_from(req_string(f, "kind", ctx), kFactKinds, ctx),
                                              req_string(f, "value", ctx)});
                    }
                }
                profile.posts.push_back(std::move(post));
            }
        }
        world.social_profiles.push_back(std::move(profile));
    }

    if (auto it = doc.find("breaches"); it != doc.end()) {
        if (!it->is_object()) bad("'breaches' must be an object");
        for (const auto& [address, pairs] : it->items()) {
            if (!pairs.is_array()) bad("breach entry for " + address + " must be an array");
            auto& list = world.breach_db.entries[address];
            for (const auto& c : pairs) list.push_back(credential_from(c, strict, "breach " + address));
        }
    }

    for (const auto& e : req_array(doc, "emails", "world")) {
        check_keys(e, {"address", "owner", "service", "credentials"}, "email", strict);
        EmailAccount account;
        account.address = req_string(e, "address", "email");
        account.owner = opt_string(e, "owner");
        account.service = opt_string(e, "service");
        if (auto c = e.find("credentials"); c != e.end()) {
            account.credentials = credential_from(*c, strict, "email " + account.address);
        }
        world.email_accounts.push_back(std::move(account));
    }

    for (const auto& l : req_array(doc, "darknet", "world")) {
        check_keys(l, {"id", "title", "kind", "price", "description"}, "listing", strict);
        DarknetListing listing;
        listing.id = req_string(l, "id", "listing");
        const std::string ctx = "listing " + listing.id;
        listing.title = req_string(l, "title", ctx);
        listing.kind = enum_from(req_string(l, "kind", ctx), kListingKinds, ctx);
        listing.price = req_int(l, "price", ctx);
        listing.description = opt_string(l, "description");
        world.darknet.push_back(std::move(listing));
    }

    for (const auto& h : req_array(doc, "hosts", "world")) {
        check_keys(h, {"address", "hostname", "services", "filesystem"}, "host", strict);
        NetworkHost host;
        host.address = req_string(h, "address", "host");
        const std::string ctx = "host " + host.address;
        host.hostname = req_string(h, "hostname", ctx);
        for (const auto& s : req_array(h, "services", ctx)) {
            check_keys(s, {"port", "name", "version", "vulnerabilities"}, ctx + " service", strict);
            Service service;
            service.port = static_cast<int>(req_int(s, "port", ctx));
            service.name = req_string(s, "name", ctx);
            service.version = opt_string(s, "version");
            if (s.contains("vulnerabilities")) {
                service.vulnerability_ids = string_list(req_array(s, "vulnerabilities", ctx), ctx);
            }
            host.services.push_back(std::move(service));
        }
        if (auto fs = h.find("filesystem"); fs != h.end()) {
            host.filesystem = node_from(*fs, strict, ctx);
        } else {
            host.filesystem = FileSystemNode{"/", NodeKind::Directory, {}, Sensitivity::None, {}};
        }
        world.network.push_back(std::move(host));
    }

    for (const auto& p : req_array(doc, "props", "world")) {
        check_keys(p, {"id", "label", "state", "payload"}, "prop", strict);
        Prop prop;
        prop.id = req_string(p, "id", "prop");
        prop.label = opt_string(p, "label");
        const std::string ctx = "prop " + prop.id;
        prop.state = p.contains("state") ? enum_from(req_string(p, "state", ctx), kPropStates, ctx)
                                         : PropState::Hidden;
        prop.payload = p.contains("payload") ? enum_from(req_string(p, "payload", ctx), kPayloads, ctx)
                                             : Payload::None;
        world.props.push_back(std::move(prop));
    }

    world.wallet.balance = req_int(doc, "wallet", "world");

    if (doc.contains("exploits")) {
        for (const auto& x : req_array(doc, "exploits", "world")) {
            check_keys(x, {"name", "description", "required_options", "vulnerabilities", "payloads"},
                       "exploit", strict);
            ExploitCatalogEntry entry;
            entry.name = req_string(x, "name", "exploit");
            const std::string ctx = "exploit " + entry.name;
            entry.description = opt_string(x, "description");
            for (auto& key : string_list(req_array(x, "required_options", ctx), ctx)) {
                entry.required_options.insert(std::move(key));
            }
            entry.vulnerability_ids = string_list(req_array(x, "vulnerabilities", ctx), ctx);
            entry.payloads = string_list(req_array(x, "payloads", ctx), ctx);
            world.exploits.push_back(std::move(entry));
        }
    }

    if (doc.contains("templates")) {
        for (const auto& t : req_array(doc, "templates", "world")) {
            check_keys(t, {"id", "principle", "impersonates", "sender", "subject", "body"},
                       "template", strict);
            PhishingTemplate tmpl;
            tmpl.id = req_string(t, "id", "template");
            const std::string ctx = "template " + tmpl.id;
            tmpl.principle = enum_from(req_string(t, "principle", ctx), kPrinciples, ctx);
            tmpl.impersonates = opt_string(t, "impersonates");
            tmpl.sender = req_string(t, "sender", ctx);
            tmpl.subject = req_string(t, "subject", ctx);
            tmpl.body = req_string(t, "body", ctx);
            world.templates.push_back(std::move(tmpl));
        }
    }

    if (auto it = doc.find("login"); it != doc.end()) {
        check_keys(*it, {"host", "user_field", "pass_field", "query_template", "users"}, "login", strict);
        LoginGate gate;
        gate.host = req_string(*it, "host", "login");
        if (it->contains("user_field")) gate.user_field = req_string(*it, "user_field", "login");
        if (it->contains("pass_field")) gate.pass_field = req_string(*it, "pass_field", "login");
        gate.query_template = req_string(*it, "query_template", "login");
        for (const auto& u : req_array(*it, "users", "login")) {
            gate.users.push_back(credential_from(u, strict, "login user"));
        }
        world.login_gate = std::move(gate);
    }

    if (doc.contains("flags")) {
        for (auto& f : string_list(req_array(doc, "flags", "world"), "flags")) {
            world.flags.insert(std::move(f));
        }
    }

    return world;
}

WorldState load_world_file(const std::string& path, bool strict) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::WorldLoadError, "cannot read world file " + path);
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::WorldLoadError,
                    path + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    WorldState world;
    try {
        world = world_from_json(doc, strict);
    } catch (const Error& e) {
        throw Error(ErrorCode::WorldLoadError, path + ": " + e.what());
    }
    auto defects = validate_world(world);
    if (!defects.empty()) {
        throw Error(ErrorCode::WorldLoadError, path + ": invalid world (" + defects.front() + ")",
                    std::move(defects));
    }
    return world;
}

json to_json(const WorldState& world) {
    json doc;
    json profiles = json::array();
    for (const auto& p : world.social_profiles) {
        json posts = json::array();
        for (const auto& post : p.posts) {
            json facts = json::array();
            for (const auto& f : post.facts) facts.push_back({{"kind", to_string(f.kind)}, {"value", f.value}});
            posts.push_back({{"text", post.text}, {"facts", std::move(facts)}});
        }
        profiles.push_back({{"handle", p.handle},
                            {"display_name", p.display_name},
                            {"employer", p.employer},
                            {"posts", std::move(posts)}});
    }
    doc["profiles"] = std::move(profiles);

    json breaches = json::object();
    for (const auto& [address, pairs] : world.breach_db.entries) {
        json list = json::array();
        for (const auto& c : pairs) list.push_back(credential_json(c));
        breaches[address] = std::move(list);
    }
    doc["breaches"] = std::move(breaches);

    json emails = json::array();
    for (const auto& e : world.email_accounts) {
        emails.push_back({{"address", e.address},
                          {"owner", e.owner},
                          {"service", e.service},
                          {"credentials", credential_json(e.credentials)}});
    }
    doc["emails"] = std::move(emails);

    json darknet = json::array();
    for (const auto& l : world.darknet) {
        darknet.push_back({{"id", l.id},
                           {"title", l.title},
                           {"kind", to_string(l.kind)},
                           {"price", l.price},
                           {"description", l.description}});
    }
    doc["darknet"] = std::move(darknet);

    json hosts = json::array();
    for (const auto& h : world.network) {
        json services = json::array();
        for (const auto& s : h.services) {
            services.push_back({{"port", s.port},
                                {"name", s.name},
                                {"version", s.version},
                                {"vulnerabilities", s.vulnerability_ids}});
        }
        hosts.push_back({{"address", h.address},
                         {"hostname", h.hostname},
                         {"services", std::move(services)},
                         {"filesystem", node_json(h.filesystem)}});
    }
    doc["hosts"] = std::move(hosts);

    json props = json::array();
    for (const auto& p : world.props) {
        props.push_back({{"id", p.id},
                         {"label", p.label},
                         {"state", to_string(p.state)},
                         {"payload", to_string(p.payload)}});
    }
    doc["props"] = std::move(props);
    doc["wallet"] = world.wallet.balance;

    json exploits = json::array();
    for (const auto& x : world.exploits) {
        exploits.push_back({{"name", x.name},
                            {"description", x.description},
                            {"required_options", x.required_options},
                            {"vulnerabilities", x.vulnerability_ids},
                            {"payloads", x.payloads}});
    }
    doc["exploits"] = std::move(exploits);

    json templates = json::array();
    for (const auto& t : world.templates) {
        templates.push_back({{"id", t.id},
                             {"principle", to_string(t.principle)},
                             {"impersonates", t.impersonates},
                             {"sender", t.sender},
                             {"subject", t.subject},
                             {"body", t.body}});
    }
    doc["templates"] = std::move(templates);

    if (world.login_gate) {
        const auto& g = *world.login_gate;
        json users = json::array();
        for (const auto& u : g.users) users.push_back(credential_json(u));
        doc["login"] = {{"host", g.host},
                        {"user_field", g.user_field},
                        {"pass_field", g.pass_field},
                        {"query_template", g.query_template},
                        {"users", std::move(users)}};
    }
    doc["flags"] = world.flags;
    return doc;
}

std::vector<std::string> validate_world(const WorldState& world) {
    std::vector<std::string> defects;
    check_unique(world.social_profiles, [](const auto& p) { return p.handle; }, "profile handle", defects);
    check_unique(world.email_accounts, [](const auto& e) { return e.address; }, "email address", defects);
    check_unique(world.network, [](const auto& h) { return h.address; }, "host address", defects);
    check_unique(world.darknet, [](const auto& l) { return l.id; }, "listing id", defects);
    check_unique(world.props, [](const auto& p) { return p.id; }, "prop id", defects);
    check_unique(world.exploits, [](const auto& x) { return x.name; }, "exploit name", defects);
    check_unique(world.templates, [](const auto& t) { return t.id; }, "template id", defects);

    if (world.wallet.balance < 0) defects.push_back("wallet balance is negative");

    for (const auto& p : world.social_profiles) {
        for (const auto& post : p.posts) {
            for (const auto& f : post.facts) {
                if (f.kind == FactKind::BusinessEmail && !find_email_account(world, f.value)) {
                    defects.push_back("profile " + p.handle + " references unknown email " + f.value);
                }
            }
        }
    }

    for (const auto& l : world.darknet) {
        if (l.price <= 0) defects.push_back("listing " + l.id + " has non-positive price");
    }

    std::set<std::string> catalog_ids;
    for (const auto& x : world.exploits) {
        catalog_ids.insert(x.vulnerability_ids.begin(), x.vulnerability_ids.end());
        if (!x.required_options.contains("TARGET") || !x.required_options.contains("PAYLOAD")) {
            defects.push_back("exploit " + x.name + " must require TARGET and PAYLOAD");
        }
    }

    for (const auto& h : world.network) {
        if (!in_simulated_range(h.address)) {
            defects.push_back("host " + h.address + " is outside " + std::string(kSimulatedRange));
        }
        std::set<int> ports;
        for (const auto& s : h.services) {
            if (s.port < 1 || s.port > 65535) {
                defects.push_back("host " + h.address + " has invalid port " + std::to_string(s.port));
            }
            if (!ports.insert(s.port).second) {
                defects.push_back("host " + h.address + " has duplicate port " + std::to_string(s.port));
            }
            for (const auto& v : s.vulnerability_ids) {
                if (!catalog_ids.contains(v)) {
                    defects.push_back("host " + h.address + " references vulnerability " + v +
                                      " missing from the exploit catalog");
                }
            }
        }
        if (h.filesystem.kind != NodeKind::Directory) {
            defects.push_back("host " + h.address + " filesystem root is not a directory");
        }
        check_tree(h.filesystem, "/", defects);
    }

    if (world.login_gate) {
        const auto& t = world.login_gate->query_template;
        auto count = [&](std::string_view slot) {
            std::size_t n = 0;
            for (auto pos = t.find(slot); pos != std::string::npos; pos = t.find(slot, pos + 1)) ++n;
            return n;
        };
        if (count("{user}") != 1 || count("{pass}") != 1) {
            defects.push_back("login query_template must contain {user} and {pass} exactly once");
        }
        if (!find_host(world, world.login_gate->host)) {
            defects.push_back("login gate host " + world.login_gate->host + " does not exist");
        }
    }
    return defects;
}

// ---------------------------------------------------------------------------

std::vector<SearchHit> search_social_media(const WorldState& world, std::string_view query) {
    const std::string needle = trim(query);
    if (needle.empty()) throw Error(ErrorCode::EmptyQuery, "search query is empty");

    std::vector<SearchHit> hits;
    for (const auto& profile : world.social_profiles) {
        const bool profile_match = icontains(profile.handle, needle) ||
                                   icontains(profile.display_name, needle) ||
                                   icontains(profile.employer, needle);
        std::vector<Post> posts;
        for (const auto& post : profile.posts) {
            if (profile_match || icontains(post.text, needle)) posts.push_back(post);
        }
        if (profile_match || !posts.empty()) hits.push_back({profile, std::move(posts)});
    }
    std::sort(hits.begin(), hits.end(),
              [](const SearchHit& a, const SearchHit& b) { return a.profile.handle < b.profile.handle; });
    return hits;
}

bool is_valid_email(std::string_view email) {
    const auto at = email.find('@');
    if (at == std::string_view::npos || email.find('@', at + 1) != std::string_view::npos) return false;
    if (at == 0 || at + 1 == email.size()) return false;
    return std::none_of(email.begin(), email.end(),
                        [](unsigned char c) { return std::isspace(c) || std::iscntrl(c); });
}

BreachResult check_breach(const WorldState& world, std::string_view email) {
    if (!is_valid_email(email)) {
        throw Error(ErrorCode::MalformedEmail, "not an email address: " + std::string(email));
    }
    auto it = world.breach_db.entries.find(std::string(email));
    if (it == world.breach_db.entries.end()) return {};
    return {true, it->second};
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
    std::uint32_t value = 0;
    int parts = 0;
    std::size_t pos = 0;
    for (;;) {
        const auto end = std::min(text.find('.', pos), text.size());
        const auto part = text.substr(pos, end - pos);
        unsigned octet = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), octet);
        if (part.empty() || part.size() > 3 || ec != std::errc{} ||
            ptr != part.data() + part.size() || octet > 255) {
            return std::nullopt;
        }
        value = (value << 8) | octet;
        if (++parts > 4) return std::nullopt;
        if (end == text.size()) break;
        pos = end + 1;
    }
    if (parts != 4) return std::nullopt;
    return value;
}

bool in_simulated_range(std::string_view address) {
    const auto ip = parse_ipv4(address);
    if (!ip) return false;
    const std::uint32_t mask = ~((1u << (32 - kRangePrefix)) - 1);
    const std::uint32_t host = *ip & ~mask;
    // Exclude network and broadcast addresses.
    return (*ip & mask) == range_base() && host != 0 && host != ~mask;
}

ScanReport scan_network(const WorldState& world, std::string_view target_spec) {
    const std::string spec = trim(target_spec);
    std::vector<const NetworkHost*> selected;
    if (spec == kSimulatedRange) {
        for (const auto& h : world.network) selected.push_back(&h);
    } else {
        if (!parse_ipv4(spec)) {
            throw Error(ErrorCode::InvalidArgument,
                        "scan target must be an address or " + std::string(kSimulatedRange));
        }
        if (!in_simulated_range(spec)) {
            throw Error(ErrorCode::OutOfSimulatedRange,
                        spec + " is outside the simulated network " + std::string(kSimulatedRange));
        }
        if (const auto* h = find_host(world, spec)) selected.push_back(h);
    }
    std::sort(selected.begin(), selected.end(), [](const NetworkHost* a, const NetworkHost* b) {
        return *parse_ipv4(a->address) < *parse_ipv4(b->address);
    });
    ScanReport report;
    for (const auto* h : selected) {
        ScanHost entry{h->address, h->hostname, h->services};
        std::sort(entry.services.begin(), entry.services.end(),
                  [](const Service& a, const Service& b) { return a.port < b.port; });
        report.hosts.push_back(std::move(entry));
    }
    return report;
}

std::pair<WorldState, Receipt> purchase_listing(const WorldState& world, std::string_view listing_id) {
    auto it = std::find_if(world.darknet.begin(), world.darknet.end(),
                           [&](const DarknetListing& l) { return l.id == listing_id; });
    if (it == world.darknet.end()) {
        throw Error(ErrorCode::UnknownListing, "no listing '" + std::string(listing_id) + "'");
    }
    if (world.wallet.balance < it->price) {
        throw Error(ErrorCode::InsufficientFunds,
                    "wallet holds " + std::to_string(world.wallet.balance) + " units, listing costs " +
                        std::to_string(it->price));
    }
    WorldState next = world;
    next.wallet.balance -= it->price;
    return {std::move(next), Receipt{it->id, it->price, it->kind}};
}

std::string resolve_path(std::string_view cwd, std::string_view path) {
    std::vector<std::string> parts;
    auto push_segments = [&](std::string_view text) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('/', pos);
            if (end == std::string_view::npos) end = text.size();
            const auto seg = text.substr(pos, end - pos);
            if (seg == "..") {
                if (!parts.empty()) parts.pop_back();
            } else if (!seg.empty() && seg != ".") {
                parts.emplace_back(seg);
            }
            pos = end + 1;
        }
    };
    if (path.empty() || path.front() != '/') push_segments(cwd);
    push_segments(path);
    std::string out;
    for (const auto& p : parts) out += "/" + p;
    return out.empty() ? "/" : out;
}

FsResult fs_navigate(const NetworkHost& host, std::string_view path) {
    const std::string normalized = resolve_path("/", path);
    const FileSystemNode* node = &host.filesystem;
    std::string walked;
    if (normalized != "/") {
        std::size_t pos = 1;
        while (pos <= normalized.size()) {
            auto end = normalized.find('/', pos);
            if (end == std::string::npos) end = normalized.size();
            const std::string seg = normalized.substr(pos, end - pos);
            if (node->kind != NodeKind::Directory) {
                throw Error(ErrorCode::NotADirectory, walked + " is not a directory");
            }
            auto it = std::find_if(node->children.begin(), node->children.end(),
                                   [&](const FileSystemNode& c) { return c.name == seg; });
            walked += "/" + seg;
            if (it == node->children.end()) {
                throw Error(ErrorCode::NoSuchPath, "no such file or directory: " + walked);
            }
            node = &*it;
            pos = end + 1;
        }
    }
    FsResult result;
    result.path = normalized;
    result.kind = node->kind;
    result.sensitive = node->sensitivity == Sensitivity::Sensitive;
    if (node->kind == NodeKind::File) {
        result.contents = node->contents;
    } else {
        for (const auto& c : node->children) {
            result.entries.push_back({c.name, c.kind, c.sensitivity == Sensitivity::Sensitive});
        }
        std::sort(result.entries.begin(), result.entries.end(),
                  [](const DirectoryEntry& a, const DirectoryEntry& b) { return a.name < b.name; });
    }
    return result;
}

const NetworkHost* find_host(const WorldState& world, std::string_view address) {
    for (const auto& h : world.network) {
        if (h.address == address) return &h;
    }
    return nullptr;
}

const Prop* find_prop(const WorldState& world, std::string_view id) {
    for (const auto& p : world.props) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

const EmailAccount* find_email_account(const WorldState& world, std::string_view address) {
    for (const auto& e : world.email_accounts) {
        if (e.address == address) return &e;
    }
    return nullptr;
}

namespace {

WorldState move_prop(const WorldState& world, std::string_view prop_id, PropState from, PropState to) {
    WorldState next = world;
    auto it = std::find_if(next.props.begin(), next.props.end(),
                           [&](const Prop& p) { return p.id == prop_id; });
    if (it == next.props.end()) {
        throw Error(ErrorCode::PropNotFound, "no prop '" + std::string(prop_id) + "'");
    }
    if (it->state != from) {
        throw Error(ErrorCode::InvalidArgument, "prop " + it->id + " is " +
                                                    std::string(to_string(it->state)) + ", expected " +
                                                    std::string(to_string(from)));
    }
    it->state = to;
    return next;
}

}  // namespace

WorldState reveal_prop(const WorldState& world, std::string_view prop_id) {
    return move_prop(world, prop_id, PropState::Hidden, PropState::Found);
}

WorldState use_prop(const WorldState& world, std::string_view prop_id) {
    return move_prop(world, prop_id, PropState::Found, PropState::Used);
}

}  // namespace getin
