#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace raman {

enum class Errc {
    invalid_argument,
    unphysical_grid,
    out_of_support,
    too_large,
    numerical_error,
    step_too_large,
    invalid_frame,
    not_normalized,
    invalid_density,
    invalid_series,
    fit_failed,
    division_by_zero,
};

constexpr std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::unphysical_grid: return "unphysical-grid";
    case Errc::out_of_support: return "out-of-support";
    case Errc::too_large: return "too-large";
    case Errc::numerical_error: return "numerical-error";
    case Errc::step_too_large: return "step-too-large";
    case Errc::invalid_frame: return "invalid-frame";
    case Errc::not_normalized: return "not-normalized";
    case Errc::invalid_density: return "invalid-density";
    case Errc::invalid_series: return "invalid-series";
    case Errc::fit_failed: return "fit-failed";
    case Errc::division_by_zero: return "division-by-zero";
    }
    return "unknown";
}

/// Library-wide exception. The code identifies the failure class so callers
/// (the CLI in particular) can map it onto exit codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what)
{
    if (!cond)
        fail(code, what);
}

} // namespace raman
