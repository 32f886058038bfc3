#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anchorlife
{

enum class ErrorCode
{
    MalformedRow,
    NonMonotonicTime,
    TooFewSamples,
    InvalidValue,
    MissingFile,
    InvalidManifest,
    DegenerateSeries,
    ParallelLines,
    DegenerateX,
    LengthMismatch,
    SingularJacobian,
    NonFiniteModel,
    MissingFailureStrain,
    TooFewPoints,
    ZeroSlope,
    NonPositiveInput,
    BelowThresholdStress,
    SeparationViolated,
    NoRoot,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit. `specimen_id` is filled in when the
/// error can be attributed to one specimen of a campaign.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& message, std::string specimen_id = {})
        : std::runtime_error(compose(code, message, specimen_id)), code_(code), specimen_id_(std::move(specimen_id))
    {
    }

    ErrorCode code() const noexcept { return code_; }
    const std::string& specimen_id() const noexcept { return specimen_id_; }

    /// Same error, now attributed to `id`.
    Error tagged(std::string id) const
    {
        std::string msg = what();
        return Error(code_, strip_prefix(msg), std::move(id));
    }

  private:
    static std::string compose(ErrorCode code, const std::string& message, const std::string& id)
    {
        std::string out(to_string(code));
        if (!id.empty())
            out += " [" + id + "]";
        out += ": " + message;
        return out;
    }

    static std::string strip_prefix(const std::string& msg)
    {
        auto pos = msg.find(": ");
        return pos == std::string::npos ? msg : msg.substr(pos + 2);
    }

    ErrorCode code_;
    std::string specimen_id_;
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::ParallelLines: return "ParallelLines";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NonFiniteModel: return "NonFiniteModel";
    case ErrorCode::MissingFailureStrain: return "MissingFailureStrain";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ZeroSlope: return "ZeroSlope";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::BelowThresholdStress: return "BelowThresholdStress";
    case ErrorCode::SeparationViolated: return "SeparationViolated";
    case ErrorCode::NoRoot: return "NoRoot";
    }
    return "Unknown";
}

} // namespace anchorlife
