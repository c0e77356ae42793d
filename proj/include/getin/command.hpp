#pragma once

#include "getin/util.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace getin {

// A parsed terminal line. Verb and subcommand are lowercased; arguments keep
// the player's spelling.
struct Command {
    std::string verb;
    std::string sub;
    std::vector<std::string> args;
    bool operator==(const Command&) const = default;
};

struct ParseError {
    std::string message;
    std::string token;  // offending token, empty when the line itself is the problem
    std::string hint;   // usage text
    bool operator==(const ParseError&) const = default;
};

using ParseResult = std::variant<Command, ParseError>;

inline constexpr std::size_t kMaxCommandLength = 4096;

// One accepted shape of a command, e.g. `phish send <email>`.
struct CommandForm {
    std::string verb;
    std::string sub;
    std::vector<std::string> args;  // argument names
    std::size_t required = 0;       // leading args that must be present
    bool rest = false;              // last arg swallows the remaining tokens
    std::string summary;

    [[nodiscard]] std::string usage() const;
};

const std::vector<CommandForm>& command_forms();
const std::vector<std::string>& command_verbs();
const CommandForm* find_form(std::string_view verb, std::string_view sub);

// Total: every input yields a Command or a ParseError.
ParseResult parse_command(std::string_view line);

// Inverse of parse_command for grammar-valid commands.
std::string render(const Command& command);

// verb, subcommand (if any), then arguments.
std::vector<std::string> command_tokens(const Command& command);

// Whitespace tokenizer used by parse_command: double quotes group, and
// inside them \" and \\ escape. Single quotes are ordinary characters.
std::variant<std::vector<std::string>, ParseError> tokenize(std::string_view line);

// A command matcher from a scenario file, e.g. `set TARGET *`. Tokens are
// shell-style globs compared against command_tokens().
struct CommandPattern {
    std::vector<std::string> tokens;
    bool operator==(const CommandPattern&) const = default;

    [[nodiscard]] const std::string& verb() const { return tokens.front(); }
    [[nodiscard]] bool matches(const Command& command) const;
    [[nodiscard]] std::string text() const;
};

// Throws Error(ParseError) for patterns naming unknown verbs or subcommands.
CommandPattern parse_pattern(std::string_view text);

// Machine-readable grammar served to clients.
json grammar_json();

}  // namespace getin
