#include "getin/error.hpp"

namespace getin {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyQuery: return "EmptyQuery";
        case ErrorCode::MalformedEmail: return "MalformedEmail";
        case ErrorCode::OutOfSimulatedRange: return "OutOfSimulatedRange";
        case ErrorCode::UnknownListing: return "UnknownListing";
        case ErrorCode::InsufficientFunds: return "InsufficientFunds";
        case ErrorCode::NoSuchPath: return "NoSuchPath";
        case ErrorCode::NotADirectory: return "NotADirectory";
        case ErrorCode::IsADirectory: return "IsADirectory";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownScenario: return "UnknownScenario";
        case ErrorCode::ScenarioInProgress: return "ScenarioInProgress";
        case ErrorCode::NoActiveScenario: return "NoActiveScenario";
        case ErrorCode::SessionTerminated: return "SessionTerminated";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::UnknownTarget: return "UnknownTarget";
        case ErrorCode::TemplateNotSelected: return "TemplateNotSelected";
        case ErrorCode::UnknownExploit: return "UnknownExploit";
        case ErrorCode::MissingOption: return "MissingOption";
        case ErrorCode::InvalidPayload: return "InvalidPayload";
        case ErrorCode::UnknownHost: return "UnknownHost";
        case ErrorCode::PropNotFound: return "PropNotFound";
        case ErrorCode::ZeroDayNotOwned: return "ZeroDayNotOwned";
        case ErrorCode::NotFlashed: return "NotFlashed";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownForm: return "UnknownForm";
        case ErrorCode::ValidationFailed: return "ValidationFailed";
        case ErrorCode::WorldLoadError: return "WorldLoadError";
        case ErrorCode::Conflict: return "Conflict";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace getin
