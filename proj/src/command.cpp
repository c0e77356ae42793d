#include "getin/command.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <cctype>

namespace getin {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<CommandForm> build_forms() {
    return {
        {"search", "", {"query"}, 1, true, "search social media profiles and posts"},
        {"breach-check", "", {"email"}, 1, false, "look an address up in known data breaches"},
        {"phish", "start", {}, 0, false, "launch the phishing kit"},
        {"phish", "select-template", {"template"}, 1, false, "pick the lure email template"},
        {"phish", "send", {"email"}, 1, false, "send the lure to a target address"},
        {"scan", "", {"target"}, 1, false, "scan an address or the whole simulated network"},
        {"use", "", {"exploit"}, 1, false, "select an exploit from the catalog"},
        {"set", "", {"key", "value"}, 2, false, "set an exploit option"},
        {"run", "", {}, 0, false, "launch the configured exploit"},
        {"ls", "", {"path"}, 0, false, "list a directory on the connected host"},
        {"cd", "", {"path"}, 1, false, "change directory on the connected host"},
        {"cat", "", {"path"}, 1, false, "print a file on the connected host"},
        {"download", "", {"path"}, 1, false, "copy a file from the remote session"},
        {"login", "", {"username", "password"}, 2, false, "submit the login form"},
        {"darknet", "browse", {}, 0, false, "list darknet market offers"},
        {"darknet", "buy", {"listing"}, 1, false, "buy a darknet listing"},
        {"usb", "flash", {"payload"}, 1, false, "write a payload to the USB stick"},
        {"usb", "label", {"text"}, 1, true, "write a label on the USB stick"},
        {"help", "", {"verb"}, 0, false, "show the commands accepted right now"},
    };
}

std::string quote_if_needed(std::string_view arg) {
    const bool plain = !arg.empty() && std::none_of(arg.begin(), arg.end(), [](char c) {
        return is_space(c) || c == '"';
    });
    if (plain) return std::string(arg);
    std::string out = "\"";
    for (char c : arg) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string verb_list() {
    std::string out;
    for (const auto& v : command_verbs()) {
        if (!out.empty()) out += ", ";
        out += v;
    }
    return out;
}

}  // namespace

std::string CommandForm::usage() const {
    std::string out = verb;
    if (!sub.empty()) out += " " + sub;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string name = args[i] + (rest && i + 1 == args.size() ? "..." : "");
        out += i < required ? " <" + name + ">" : " [" + name + "]";
    }
    return out;
}

const std::vector<CommandForm>& command_forms() {
    static const std::vector<CommandForm> forms = build_forms();
    return forms;
}

const std::vector<std::string>& command_verbs() {
    static const std::vector<std::string> verbs = [] {
        std::vector<std::string> out;
        for (const auto& f : command_forms()) {
            if (std::find(out.begin(), out.end(), f.verb) == out.end()) out.push_back(f.verb);
        }
        return out;
    }();
    return verbs;
}

const CommandForm* find_form(std::string_view verb, std::string_view sub) {
    for (const auto& f : command_forms()) {
        if (f.verb == verb && f.sub == sub) return &f;
    }
    return nullptr;
}

std::variant<std::vector<std::string>, ParseError> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        if (i == line.size()) break;
        std::string token;
        while (i < line.size() && !is_space(line[i])) {
            if (line[i] != '"') {
                token.push_back(line[i++]);
                continue;
            }
            const std::size_t open = i++;
            bool closed = false;
            while (i < line.size()) {
                const char c = line[i];
                if (c == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (c == '\\' && i + 1 < line.size() && (line[i + 1] == '"' || line[i + 1] == '\\')) {
                    token.push_back(line[i + 1]);
                    i += 2;
                    continue;
                }
                token.push_back(c);
                ++i;
            }
            if (!closed) {
                return ParseError{"unterminated quote", std::string(line.substr(open, 16)),
                                  "close the double quote: \"like this\""};
            }
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

ParseResult parse_command(std::string_view line) {
    if (line.size() > kMaxCommandLength) {
        return ParseError{"line too long", "", "commands are limited to 4096 bytes"};
    }
    auto tokenized = tokenize(line);
    if (auto* err = std::get_if<ParseError>(&tokenized)) return *err;
    auto& tokens = std::get<std::vector<std::string>>(tokenized);
    if (tokens.empty()) return ParseError{"empty command", "", "known verbs: " + verb_list()};

    Command cmd;
    cmd.verb = to_lower(tokens.front());
    std::size_t next = 1;
    const auto& verbs = command_verbs();
    if (std::find(verbs.begin(), verbs.end(), cmd.verb) == verbs.end()) {
        return ParseError{"unknown verb", tokens.front(), "known verbs: " + verb_list()};
    }

    const CommandForm* form = find_form(cmd.verb, "");
    if (!form) {
        std::string subs;
        for (const auto& f : command_forms()) {
            if (f.verb == cmd.verb) subs += (subs.empty() ? "" : " | ") + f.sub;
        }
        if (tokens.size() < 2) {
            return ParseError{"missing subcommand", tokens.front(), cmd.verb + " " + subs};
        }
        cmd.sub = to_lower(tokens[1]);
        form = find_form(cmd.verb, cmd.sub);
        if (!form) return ParseError{"unknown subcommand", tokens[1], cmd.verb + " " + subs};
        next = 2;
    }

    std::vector<std::string> args(tokens.begin() + static_cast<std::ptrdiff_t>(next), tokens.end());
    if (args.size() < form->required) {
        return ParseError{"missing argument", form->args[args.size()], "usage: " + form->usage()};
    }
    if (form->rest && args.size() > form->args.size()) {
        std::string joined;
        for (std::size_t k = form->args.size() - 1; k < args.size(); ++k) {
            if (!joined.empty()) joined.push_back(' ');
            joined += args[k];
        }
        args.resize(form->args.size() - 1);
        args.push_back(std::move(joined));
    }
    if (args.size() > form->args.size()) {
        return ParseError{"too many arguments", args[form->args.size()], "usage: " + form->usage()};
    }
    cmd.args = std::move(args);
    return cmd;
}

std::string render(const Command& command) {
    std::string out = command.verb;
    if (!command.sub.empty()) out += " " + command.sub;
    for (const auto& a : command.args) out += " " + quote_if_needed(a);
    return out;
}

std::vector<std::string> command_tokens(const Command& command) {
    std::vector<std::string> out{command.verb};
    if (!command.sub.empty()) out.push_back(command.sub);
    out.insert(out.end(), command.args.begin(), command.args.end());
    return out;
}

bool CommandPattern::matches(const Command& command) const {
    const auto actual = command_tokens(command);
    if (actual.size() != tokens.size()) return false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!glob_match(tokens[i], actual[i])) return false;
    }
    return true;
}

std::string CommandPattern::text() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

CommandPattern parse_pattern(std::string_view text) {
    auto tokenized = tokenize(text);
    if (auto* err = std::get_if<ParseError>(&tokenized)) {
        throw Error(ErrorCode::ParseError, "command pattern '" + std::string(text) + "': " + err->message);
    }
    auto tokens = std::get<std::vector<std::string>>(std::move(tokenized));
    if (tokens.empty()) throw Error(ErrorCode::ParseError, "empty command pattern");
    tokens[0] = to_lower(tokens[0]);
    const auto& verbs = command_verbs();
    if (std::find(verbs.begin(), verbs.end(), tokens[0]) == verbs.end()) {
        throw Error(ErrorCode::ParseError, "command pattern uses unknown verb '" + tokens[0] + "'");
    }
    if (!find_form(tokens[0], "")) {
        if (tokens.size() < 2) {
            throw Error(ErrorCode::ParseError, "command pattern '" + tokens[0] + "' needs a subcommand");
        }
        tokens[1] = to_lower(tokens[1]);
        if (!find_form(tokens[0], tokens[1])) {
            throw Error(ErrorCode::ParseError,
                        "command pattern uses unknown subcommand '" + tokens[0] + " " + tokens[1] + "'");
        }
    }
    return CommandPattern{std::move(tokens)};
}

json grammar_json() {
    json forms = json::array();
    for (const auto& f : command_forms()) {
        json args = json::array();
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            args.push_back({{"name", f.args[i]},
                            {"required", i < f.required},
                            {"rest", f.rest && i + 1 == f.args.size()}});
        }
        forms.push_back({{"verb", f.verb},
                         {"sub", f.sub},
                         {"args", std::move(args)},
                         {"usage", f.usage()},
                         {"summary", f.summary}});
    }
    return {{"verbs", command_verbs()},
            {"case_insensitive", {"verb", "sub"}},
            {"quoting", "double quotes group words; \\\" and \\\\ escape inside quotes"},
            {"max_length", kMaxCommandLength},
            {"forms", std::move(forms)}};
}

}  // namespace getin
