#pragma once

#include <stdexcept>

namespace dche {

// Base class for every failure the solver can report.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DegenerateEquation : Error { using Error::Error; };
struct MapSingularity : Error { using Error::Error; };
struct PoleOfGamma : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };
struct LogarithmicCase : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct ZeroCentralCoefficient : Error { using Error::Error; };
struct InsufficientTruncation : Error { using Error::Error; };
struct RatioBreakdown : Error { using Error::Error; };
struct NoDecreasingTerm : Error { using Error::Error; };
struct BranchViolation : Error { using Error::Error; };
struct AmbiguousBranch : Error { using Error::Error; };
struct NoRegularSelection : Error { using Error::Error; };
struct NoRootInInterval : Error { using Error::Error; };
struct SingularMatch : Error { using Error::Error; };
struct SeriesNotConverged : Error { using Error::Error; };

} // namespace dche
