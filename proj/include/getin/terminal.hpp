#pragma once

#include "getin/command.hpp"
#include "getin/scenario.hpp"
#include "getin/session.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace getin {

enum class LineStyle { Plain, Emphasis, Error, Sensitive };

std::string_view to_string(LineStyle style);

inline constexpr std::size_t kMaxLineLength = 512;

struct TerminalOutput {
    struct Line {
        std::string text;
        LineStyle style = LineStyle::Plain;
        bool operator==(const Line&) const = default;
    };

    std::vector<Line> lines;
    std::string prompt;

    // Splits on newlines and wraps anything longer than kMaxLineLength.
    void add(std::string_view text, LineStyle style = LineStyle::Plain);
    void append(const TerminalOutput& other);

    [[nodiscard]] bool has_error() const;
    [[nodiscard]] json to_json() const;
    // One line per entry, error and sensitive lines prefixed with a marker.
    [[nodiscard]] std::string to_text() const;

    bool operator==(const TerminalOutput&) const = default;
};

struct CommandResult {
    TerminalOutput output;
    std::vector<Mutation> mutations;
    std::string outcome;  // matched by a transition's outcome glob

    [[nodiscard]] bool ok() const { return !output.has_error(); }
};

std::string terminal_prompt(const SessionState& state);

// Pure: reads the session, returns what the command would print and change.
// With `permitted` set, anything outside those patterns (other than `help`)
// gets a "not now" error and no mutations.
CommandResult execute_command(const SessionState& state, const Command& command,
                              const std::vector<CommandPattern>* permitted = nullptr);

// Parse errors rendered the way the terminal shows them.
TerminalOutput render_parse_error(const ParseError& error);

}  // namespace getin
