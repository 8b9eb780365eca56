#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transcend {

enum class Errc {
    // distcore
    AllZero,
    NegativeWeight,
    InvalidDist,
    InvalidTemperature,
    ZeroSupportCollapse,
    DimensionMismatch,
    SupportTooSmall,
    // experts
    InvalidInstance,
    RhoOutOfRange,
    BadPartition,
    IndexOutOfRange,
    // rewardlab
    GridEmpty,
    EmptyStateList,
    // gamelab
    TerminalState,
    IllegalMove,
    // chesscore
    MalformedFen,
    IllegalSan,
    AmbiguousSan,
    MalformedSan,
    UnknownSymbol,
    NoQualifyingStates,
    ParseError,
    // rating
    InvalidRating,
    NonConvergence,
    NoGames,
    // engine
    EngineTimeout,
    IllegalEngineMove,
    EngineCrashed,
    ProviderUnreachable,
    ProviderTimeout,
    MalformedReply,
    // cli
    ConfigError,
};

constexpr std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::AllZero: return "AllZero";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::InvalidDist: return "InvalidDist";
    case Errc::InvalidTemperature: return "InvalidTemperature";
    case Errc::ZeroSupportCollapse: return "ZeroSupportCollapse";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SupportTooSmall: return "SupportTooSmall";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::RhoOutOfRange: return "RhoOutOfRange";
    case Errc::BadPartition: return "BadPartition";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::GridEmpty: return "GridEmpty";
    case Errc::EmptyStateList: return "EmptyStateList";
    case Errc::TerminalState: return "TerminalState";
    case Errc::IllegalMove: return "IllegalMove";
    case Errc::MalformedFen: return "MalformedFen";
    case Errc::IllegalSan: return "IllegalSan";
    case Errc::AmbiguousSan: return "AmbiguousSan";
    case Errc::MalformedSan: return "MalformedSan";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::NoQualifyingStates: return "NoQualifyingStates";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidRating: return "InvalidRating";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NoGames: return "NoGames";
    case Errc::EngineTimeout: return "EngineTimeout";
    case Errc::IllegalEngineMove: return "IllegalEngineMove";
    case Errc::EngineCrashed: return "EngineCrashed";
    case Errc::ProviderUnreachable: return "ProviderUnreachable";
    case Errc::ProviderTimeout: return "ProviderTimeout";
    case Errc::MalformedReply: return "MalformedReply";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error code; what() is "<Code>: detail".
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail)
        , code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace transcend
