#include "getin/terminal.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <cctype>

namespace getin {

namespace {

std::string pad(std::string_view text, std::size_t width) {
    std::string out(text);
    if (out.size() < width) out.append(width - out.size(), ' ');
    return out;
}

std::optional<std::string> connected_host(const SessionState& s) {
    if (s.progress.remote.open) return s.progress.remote.host;
    return s.progress.logged_in_host;
}

const Prop* current_usb(const WorldState& world) {
    for (const auto& p : world.props) {
        if (p.state == PropState::Found) return &p;
    }
    return nullptr;
}

struct Exec {
    const SessionState& s;
    CommandResult r;

    void line(std::string_view text, LineStyle style = LineStyle::Plain) { r.output.add(text, style); }
    void fail(std::string_view text) { r.output.add(text, LineStyle::Error); }
    void fail(const Error& e) { fail(std::string(to_string(e.code())) + ": " + e.what()); }
    void mutate(std::string op, std::map<std::string, std::string> args = {}) {
        r.mutations.push_back(Mutation{std::move(op), std::move(args)});
    }

    void search(const std::string& query) {
        std::vector<SearchHit> hits;
        try {
            hits = search_social_media(s.world, query);
        } catch (const Error& e) {
            return fail(e);
        }
        line("Searching social media for \"" + query + "\" ...");
        if (hits.empty()) {
            line("No profiles found.");
            r.outcome = "no-match";
            return;
        }
        std::set<std::string> emails;
        for (const auto& hit : hits) {
            const auto& p = hit.profile;
            line("@" + p.handle + "  " + p.display_name + (p.employer.empty() ? "" : "  (" + p.employer + ")"),
                 LineStyle::Emphasis);
            for (const auto& post : hit.matching_posts) {
                line("  > " + post.text);
                for (const auto& f : post.facts) {
                    if (f.kind == FactKind::BusinessEmail) {
                        line("    [business email] " + f.value, LineStyle::Emphasis);
                        emails.insert(f.value);
                    }
                }
            }
        }
        for (const auto& email : emails) {
            if (!s.progress.known_emails.contains(email)) mutate("learn-email", {{"email", email}});
        }
        r.outcome = emails.empty() ? "no-email" : "email-found";
    }

    void breach_check(const std::string& email) {
        BreachResult result;
        try {
            result = check_breach(s.world, email);
        } catch (const Error& e) {
            return fail(e);
        }
        line("Checking " + email + " against known breach corpora ...");
        if (result.breached) {
            line("BREACHED: " + email + " appears in a known leak.", LineStyle::Emphasis);
            if (result.credentials.empty()) line("  (no plaintext passwords were leaked)");
            for (const auto& c : result.credentials) {
                line("  leaked: " + c.username + " / " + c.password, LineStyle::Sensitive);
            }
        } else {
            line(email + " was not found in any known breach.");
        }
        r.outcome = result.breached ? "breached" : "not-breached";
        mutate("breach-checked", {{"email", email}, {"result", r.outcome}});
    }

    void phish(const Command& c) {
        const auto& progress = s.progress;
        if (c.sub == "start") {
            line("Phishing kit started. Available lure templates:", LineStyle::Emphasis);
            for (const auto& t : s.world.templates) {
                line("  " + pad(t.id, 22) + "[" + std::string(to_string(t.principle)) + "] " + t.subject);
            }
            mutate("phish-start");
            r.outcome = "started";
            return;
        }
        if (!progress.phish_started) return fail("The phishing kit is not running. Start it with: phish start");
        if (c.sub == "select-template") {
            const auto* t = find_template(s.world, c.args.at(0));
            if (!t) return fail("InvalidArgument: no template named '" + c.args.at(0) + "'");
            line("Template " + t->id + " selected (principle: " + std::string(to_string(t->principle)) + ").",
                 LineStyle::Emphasis);
            line("  From:    " + t->sender);
            line("  Subject: " + t->subject);
            line("  " + t->body);
            mutate("phish-template", {{"template", t->id}});
            r.outcome = t->id;
            return;
        }
        // send
        const std::string& email = c.args.at(0);
        if (!is_valid_email(email)) return fail("MalformedEmail: not an email address: " + email);
        auto campaign = progress.campaign;
        campaign.target_email = email;
        std::pair<PhishingCampaign, VictimReaction> sent;
        try {
            sent = send_phish(campaign, s.world, progress.known_emails);
        } catch (const Error& e) {
            return fail(e);
        }
        line("Lure sent to " + email + ". Waiting for the target ...");
        if (sent.second.submitted) {
            line("[+] The target opened the link and filled in the fake login page.", LineStyle::Emphasis);
            line("Captured credentials:", LineStyle::Emphasis);
            line("  username: " + sent.second.credentials.username, LineStyle::Sensitive);
            line("  password: " + sent.second.credentials.password, LineStyle::Sensitive);
            r.outcome = "captured";
        } else {
            line("The target ignored the email.");
            r.outcome = "ignored";
        }
        mutate("phish-send", {{"email", email}});
    }

    void scan(const std::string& target) {
        ScanReport report;
        try {
            report = scan_network(s.world, target);
        } catch (const Error& e) {
            return fail(e);
        }
        line("Starting network scan of " + target + " ...");
        line(pad("HOST", 16) + pad("PORT", 7) + pad("SERVICE", 14) + "VERSION", LineStyle::Emphasis);
        for (const auto& h : report.hosts) {
            for (const auto& svc : h.services) {
                line(pad(h.address, 16) + pad(std::to_string(svc.port), 7) + pad(svc.name, 14) + svc.version);
            }
        }
        line(std::to_string(report.hosts.size()) + " host(s) up.");
        r.outcome = report.hosts.empty() ? "empty" : "ok";
    }

    void use(const std::string& name) {
        const auto* entry = find_exploit(s.world.exploits, name);
        if (!entry) return fail("UnknownExploit: no exploit named '" + name + "'");
        line("Using exploit " + entry->name, LineStyle::Emphasis);
        if (!entry->description.empty()) line("  " + entry->description);
        std::string opts;
        for (const auto& o : entry->required_options) opts += (opts.empty() ? "" : ", ") + o;
        line("  required options: " + opts);
        std::string payloads;
        for (const auto& p : entry->payloads) payloads += (payloads.empty() ? "" : ", ") + p;
        line("  payloads: " + payloads);
        mutate("exploit-use", {{"exploit", entry->name}});
        r.outcome = entry->name;
    }

    void set(const std::string& key, const std::string& value) {
        if (!s.progress.exploit) return fail("No exploit selected. Pick one with: use <exploit>");
        std::string up = key;
        std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
        line(up + " => " + value);
        mutate("exploit-set", {{"key", up}, {"value", value}});
        r.outcome = up;
    }

    void run() {
        if (!s.progress.exploit) return fail("No exploit selected. Pick one with: use <exploit>");
        ExploitOutcome outcome;
        ConfiguredExploit configured;
        try {
            configured = configure_exploit(s.world.exploits, *s.progress.exploit, s.progress.exploit_options);
            outcome = run_exploit(configured, s.world);
        } catch (const Error& e) {
            return fail(e);
        }
        line("[*] Launching " + configured.name + " against " + configured.target + " with " + configured.payload);
        if (!outcome.session_opened) {
            return fail("Exploit completed, but no session was created: " + configured.target +
                        " is not vulnerable (" + outcome.failure + ")");
        }
        line("[*] Sending stage to " + configured.target + " ...");
        line("[+] Meterpreter session 1 opened on " + configured.target, LineStyle::Emphasis);
        mutate("session-open", {{"host", configured.target}});
        r.outcome = "session-opened";
    }

    const NetworkHost* host_or_fail() {
        const auto host = connected_host(s);
        if (!host) {
            fail("Not connected to any host.");
            return nullptr;
        }
        const auto* h = find_host(s.world, *host);
        if (!h) fail("UnknownHost: " + *host);
        return h;
    }

    void filesystem(const Command& c) {
        const auto* host = host_or_fail();
        if (!host) return;
        const std::string path = resolve_path(s.progress.cwd, c.args.empty() ? "." : c.args.front());
        FsResult node;
        try {
            node = fs_navigate(*host, path);
        } catch (const Error& e) {
            return fail(e);
        }
        if (c.verb == "ls") {
            if (node.kind == NodeKind::File) {
                line(node.path, node.sensitive ? LineStyle::Sensitive : LineStyle::Plain);
            } else {
                for (const auto& e : node.entries) {
                    if (e.kind == NodeKind::Directory) {
                        line(e.name + "/");
                    } else {
                        line(e.name + (e.sensitive ? "  [sensitive]" : ""),
                             e.sensitive ? LineStyle::Sensitive : LineStyle::Plain);
                    }
                }
                if (node.entries.empty()) line("(empty)");
            }
            r.outcome = node.path;
        } else if (c.verb == "cd") {
            if (node.kind != NodeKind::Directory) return fail("NotADirectory: " + node.path + " is not a directory");
            mutate("set-cwd", {{"path", node.path}});
            r.outcome = node.path;
        } else if (c.verb == "cat") {
            if (node.kind != NodeKind::File) return fail("IsADirectory: " + node.path + " is a directory");
            const auto style = node.sensitive ? LineStyle::Sensitive : LineStyle::Plain;
            if (node.sensitive) line("[sensitive] " + node.path, LineStyle::Sensitive);
            line(node.contents, style);
            r.outcome = node.path;
        } else {  // download
            if (!s.progress.remote.open) return fail("download needs an open remote session");
            if (node.kind != NodeKind::File) return fail("IsADirectory: " + node.path + " is a directory");
            line("Downloading " + node.path + " (" + std::to_string(node.contents.size()) + " bytes) ... done");
            if (node.sensitive) line("[!] Sensitive data exfiltrated: " + node.path, LineStyle::Sensitive);
            mutate("download", {{"path", node.path}});
            r.outcome = node.sensitive ? "sensitive" : "file";
        }
    }

    void login(const std::string& user, const std::string& pass) {
        if (!s.world.login_gate) return fail("There is no login form here.");
        const auto& gate = *s.world.login_gate;
        const auto eval = evaluate_login(gate, user, pass);
        line("POST http://" + gate.host + "/login");
        line("Query: SELECT * FROM users WHERE " + eval.clause);
        if (eval.outcome != LoginOutcome::Accepted) {
            return fail(eval.malformed ? "Login failed: the server reported a database error."
                                       : "Login failed: wrong username or password.");
        }
        line(eval.tautology || std::none_of(gate.users.begin(), gate.users.end(),
                                            [&](const Credential& u) { return u.username == user && u.password == pass; })
                 ? "Login successful. The WHERE clause was always true, so the check was bypassed."
                 : "Login successful.",
             LineStyle::Emphasis);
        mutate("login", {{"host", gate.host}});
        r.outcome = "accepted";
    }

    void darknet(const Command& c) {
        if (c.sub == "browse") {
            line("Hidden service market (connected through an anonymizing network)", LineStyle::Emphasis);
            for (const auto& l : s.world.darknet) {
                line("  " + pad(l.id, 14) + pad(l.title, 36) + pad(std::string(to_string(l.kind)), 18) +
                     std::to_string(l.price) + " units");
            }
            line("Wallet balance: " + std::to_string(s.world.wallet.balance) + " units");
            r.outcome = "browsed";
            return;
        }
        std::pair<WorldState, Receipt> bought;
        try {
            bought = purchase_listing(s.world, c.args.at(0));
        } catch (const Error& e) {
            return fail(e);
        }
        line("Purchased " + bought.second.listing_id + " for " + std::to_string(bought.second.price) +
                 " units. Wallet: " + std::to_string(bought.first.wallet.balance) + " units left.",
             LineStyle::Emphasis);
        mutate("purchase", {{"listing", bought.second.listing_id}});
        r.outcome = std::string(to_string(bought.second.kind));
    }

    void usb(const Command& c) {
        const auto* prop = current_usb(s.world);
        if (!prop) return fail("PropNotFound: you have not found a USB stick yet");
        if (c.sub == "flash") {
            const auto payload = payload_from_string(to_lower(c.args.at(0)));
            if (!payload || *payload == Payload::None) {
                return fail("InvalidPayload: choose zero-day or word-prank");
            }
            try {
                flash_usb(*prop, *payload, s.inventory);
            } catch (const Error& e) {
                return fail(e);
            }
            line("Flashing " + std::string(to_string(*payload)) + " onto " + prop->id + " ... done",
                 LineStyle::Emphasis);
            line("Simulated run on a victim machine:");
            for (const auto& action : simulate_payload(*payload)) line("  [keystroke] " + action);
            mutate("flash-prop", {{"prop", prop->id}, {"payload", std::string(to_string(*payload))}});
            r.outcome = std::string(to_string(*payload));
            return;
        }
        const std::string& label = c.args.at(0);
        try {
            label_usb(*prop, label);
        } catch (const Error& e) {
            return fail(e);
        }
        line("Label written on " + prop->id + ": \"" + label + "\"", LineStyle::Emphasis);
        mutate("label-prop", {{"prop", prop->id}, {"label", label}});
        r.outcome = "labeled";
    }

    void help(const Command& c, const std::vector<CommandPattern>* permitted) {
        line("Commands available here:", LineStyle::Emphasis);
        for (const auto& f : command_forms()) {
            if (!c.args.empty() && f.verb != to_lower(c.args.front())) continue;
            const bool allowed =
                f.verb == "help" || !permitted ||
                std::any_of(permitted->begin(), permitted->end(), [&](const CommandPattern& p) {
                    return p.verb() == f.verb && (f.sub.empty() || p.tokens.size() < 2 || glob_match(p.tokens[1], f.sub));
                });
            if (allowed) line("  " + pad(f.usage(), 34) + f.summary);
        }
        r.outcome = "help";
    }
};

}  // namespace

std::string_view to_string(LineStyle style) {
    switch (style) {
        case LineStyle::Plain: return "plain";
        case LineStyle::Emphasis: return "emphasis";
        case LineStyle::Error: return "error";
        case LineStyle::Sensitive: return "sensitive";
    }
    return "plain";
}

void TerminalOutput::add(std::string_view text, LineStyle style) {
    std::size_t pos = 0;
    do {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view piece = text.substr(pos, end - pos);
        if (!piece.empty() && piece.back() == '\r') piece.remove_suffix(1);
        do {
            std::size_t take = std::min(piece.size(), kMaxLineLength);
            // Do not cut a UTF-8 sequence in half.
            if (take < piece.size()) {
                while (take > 0 && (static_cast<unsigned char>(piece[take]) & 0xC0) == 0x80) --take;
                if (take == 0) take = std::min(piece.size(), kMaxLineLength);
            }
            lines.push_back({std::string(piece.substr(0, take)), style});
            piece.remove_prefix(take);
        } while (!piece.empty());
        pos = end + 1;
    } while (pos <= text.size());
}

void TerminalOutput::append(const TerminalOutput& other) {
    lines.insert(lines.end(), other.lines.begin(), other.lines.end());
    if (!other.prompt.empty()) prompt = other.prompt;
}

bool TerminalOutput::has_error() const {
    return std::any_of(lines.begin(), lines.end(), [](const Line& l) { return l.style == LineStyle::Error; });
}

json TerminalOutput::to_json() const {
    json arr = json::array();
    for (const auto& l : lines) arr.push_back({{"text", l.text}, {"style", to_string(l.style)}});
    return {{"lines", std::move(arr)}, {"prompt", prompt}};
}

std::string TerminalOutput::to_text() const {
    std::string out;
    for (const auto& l : lines) {
        switch (l.style) {
            case LineStyle::Error: out += "! "; break;
            case LineStyle::Sensitive: out += "# "; break;
            case LineStyle::Emphasis: out += "* "; break;
            case LineStyle::Plain: out += "  "; break;
        }
        out += l.text;
        out.push_back('\n');
    }
    return out;
}

std::string terminal_prompt(const SessionState& s) {
    if (s.progress.remote.open) return "meterpreter " + s.progress.cwd + " > ";
    if (s.progress.logged_in_host) return "www@" + *s.progress.logged_in_host + ":" + s.progress.cwd + "$ ";
    if (s.progress.exploit) return "msf exploit(" + *s.progress.exploit + ") > ";
    return "attacker@sim:~$ ";
}

TerminalOutput render_parse_error(const ParseError& error) {
    TerminalOutput out;
    out.add(error.token.empty() ? error.message : error.message + ": " + error.token, LineStyle::Error);
    if (!error.hint.empty()) out.add(error.hint);
    return out;
}

CommandResult execute_command(const SessionState& state, const Command& c,
                              const std::vector<CommandPattern>* permitted) {
    Exec x{state, {}};
    if (c.verb == "help") {
        x.help(c, permitted);
    } else if (permitted && std::none_of(permitted->begin(), permitted->end(), [&](const CommandPattern& p) {
                   return p.verb() == c.verb && (c.sub.empty() || p.tokens.size() < 2 || glob_match(p.tokens[1], c.sub));
               })) {
        x.fail("Not now: '" + c.verb + (c.sub.empty() ? "" : " " + c.sub) +
               "' does not help at this point. Type 'help' to see what does.");
    } else if (c.verb == "search") {
        x.search(c.args.at(0));
    } else if (c.verb == "breach-check") {
        x.breach_check(c.args.at(0));
    } else if (c.verb == "phish") {
        x.phish(c);
    } else if (c.verb == "scan") {
        x.scan(c.args.at(0));
    } else if (c.verb == "use") {
        x.use(c.args.at(0));
    } else if (c.verb == "set") {
        x.set(c.args.at(0), c.args.at(1));
    } else if (c.verb == "run") {
        x.run();
    } else if (c.verb == "ls" || c.verb == "cd" || c.verb == "cat" || c.verb == "download") {
        x.filesystem(c);
    } else if (c.verb == "login") {
        x.login(c.args.at(0), c.args.at(1));
    } else if (c.verb == "darknet") {
        x.darknet(c);
    } else if (c.verb == "usb") {
        x.usb(c);
    } else {
        x.fail("unknown verb: " + c.verb);
    }
    if (!x.r.ok()) x.r.mutations.clear();
    x.r.output.prompt = terminal_prompt(state);
    return std::move(x.r);
}

}  // namespace getin
