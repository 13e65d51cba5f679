#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sobolev {

inline constexpr const char* kVersion = "1.0.0";

enum class ErrorCode {
    InvalidDimension,
    InvalidBubble,
    InvalidArgument,
    InvalidConfig,
    DegenerateInput,
    ConstraintViolated,
    ConditionViolated,
    IoError,
    // numerical failures
    SearchFailed,
    TailTooLarge,
    DivergentNearOrigin,
    SingularityUnresolved,
    NormalizationFailed,
    NotConverged,
    NoNearbyBubble,
    EigenSolverFailed,
    NegativeGap,
    SectorOrderingUnexpected,
    OrthogonalizationFailed,
    FitFailed,
};

const char* to_string(ErrorCode code);

// Validation errors map to CLI exit code 1, everything else to 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Spatial dimension n and exponent p with 1 < p < n. Everything else is derived.
class Dim {
public:
    Dim(int n, double p);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double pstar() const noexcept { return n_ * p_ / (n_ - p_); }
    // exponent p/(p-1) of |x| inside the bubble
    [[nodiscard]] double q() const noexcept { return p_ / (p_ - 1.0); }
    // outer exponent (n-p)/p of the bubble
    [[nodiscard]] double m() const noexcept { return (n_ - p_) / p_; }
    // p <= 2n/(n+2), equivalently p* <= 2
    [[nodiscard]] bool low_exponent() const noexcept { return p_ <= 2.0 * n_ / (n_ + 2.0) + 1e-13; }

private:
    int n_;
    double p_;
};

// |S^{k}| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
double sphere_area(int k);

}  // namespace sobolev
