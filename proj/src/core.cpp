#include "sobolev/core.hpp"

#include <numbers>

namespace sobolev {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension: return "INVALID_DIMENSION";
        case ErrorCode::InvalidBubble: return "INVALID_BUBBLE";
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
        case ErrorCode::DegenerateInput: return "DEGENERATE_INPUT";
        case ErrorCode::ConstraintViolated: return "CONSTRAINT_VIOLATED";
        case ErrorCode::ConditionViolated: return "CONDITION_VIOLATED";
        case ErrorCode::IoError: return "IO_ERROR";
        case ErrorCode::SearchFailed: return "SEARCH_FAILED";
        case ErrorCode::TailTooLarge: return "TAIL_TOO_LARGE";
        case ErrorCode::DivergentNearOrigin: return "DIVERGENT_NEAR_ORIGIN";
        case ErrorCode::SingularityUnresolved: return "SINGULARITY_UNRESOLVED";
        case ErrorCode::NormalizationFailed: return "NORMALIZATION_FAILED";
        case ErrorCode::NotConverged: return "NOT_CONVERGED";
        case ErrorCode::NoNearbyBubble: return "NO_NEARBY_BUBBLE";
        case ErrorCode::EigenSolverFailed: return "EIGENSOLVER_FAILED";
        case ErrorCode::NegativeGap: return "NEGATIVE_GAP";
        case ErrorCode::SectorOrderingUnexpected: return "SECTOR_ORDERING_UNEXPECTED";
        case ErrorCode::OrthogonalizationFailed: return "ORTHOGONALIZATION_FAILED";
        case ErrorCode::FitFailed: return "FIT_FAILED";
    }
    return "UNKNOWN";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension:
        case ErrorCode::InvalidBubble:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidConfig:
        case ErrorCode::DegenerateInput:
        case ErrorCode::ConstraintViolated:
        case ErrorCode::ConditionViolated:
        case ErrorCode::IoError:
            return true;
        default:
            return false;
    }
}

Dim::Dim(int n, double p) : n_(n), p_(p) {
    if (n < 2) throw Error(ErrorCode::InvalidDimension, "n must be >= 2, got " + std::to_string(n));
    if (!std::isfinite(p) || !(p > 1.0) || !(p < n))
        throw Error(ErrorCode::InvalidDimension, "need 1 < p < n, got p = " + std::to_string(p));
}

double sphere_area(int k) {
    const double h = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace sobolev
