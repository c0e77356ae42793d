#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace getin {

// Every failure the core can report. The C API maps these one-to-one onto
// getin_status values, the HTTP service onto status codes.
enum class ErrorCode {
    InvalidArgument,
    EmptyQuery,
    MalformedEmail,
    OutOfSimulatedRange,
    UnknownListing,
    InsufficientFunds,
    NoSuchPath,
    NotADirectory,
    IsADirectory,
    ParseError,
    ValidationError,
    UnknownScenario,
    ScenarioInProgress,
    NoActiveScenario,
    SessionTerminated,
    CorruptLog,
    UnknownTarget,
    TemplateNotSelected,
    UnknownExploit,
    MissingOption,
    InvalidPayload,
    UnknownHost,
    PropNotFound,
    ZeroDayNotOwned,
    NotFlashed,
    UnknownSession,
    UnknownForm,
    ValidationFailed,
    WorldLoadError,
    Conflict,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Error(ErrorCode code, std::string message, std::vector<std::string> details)
        : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    // Per-item diagnostics: validation defects, missing option keys,
    // offending question ids.
    [[nodiscard]] const std::vector<std::string>& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    std::vector<std::string> details_;
};

}  // namespace getin
