#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zloss {

enum class errc {
    invalid_input,
    degenerate_sample,
    insufficient_data,
    degenerate_input,
    fit_failed,
    no_sign_change,
    no_convergence,
    training_diverged,
};

constexpr std::string_view to_string(errc code) noexcept {
    switch (code) {
    case errc::invalid_input: return "InvalidInput";
    case errc::degenerate_sample: return "DegenerateSample";
    case errc::insufficient_data: return "InsufficientData";
    case errc::degenerate_input: return "DegenerateInput";
    case errc::fit_failed: return "FitFailed";
    case errc::no_sign_change: return "NoSignChange";
    case errc::no_convergence: return "NoConvergence";
    case errc::training_diverged: return "TrainingDiverged";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the `errc` kinds so
/// callers can branch on the kind instead of parsing messages.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

} // namespace zloss
