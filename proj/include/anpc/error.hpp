#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anpc {

// Every failure the library reports carries one of these codes.
enum class Errc {
    DivisorContainsZero,
    DomainError,
    PoleProximity,
    NoInteger,
    Ambiguous,
    RadiusTooLarge,
    BudgetExceeded,
    InsufficientSievingPrimes,
    SegmentTooWide,
    TilingGap,
    FormatError,
    MonotonicityViolation,
    AccuracyViolation,
    InconsistentCount,
    CoverageGap,
    ParamViolation,
    SizeMismatch,
    RealityCheckFailed,
    Infeasible,
    IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace anpc
