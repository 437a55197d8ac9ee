#pragma once

#include <stdexcept>
#include <string>

namespace lqgame {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& what) : Error("non-finite value: " + what) {}
};

// Lyapunov operator has a zero eigenvalue (some eigenvalue pair of A sums to zero).
struct SingularOperator : Error {
    explicit SingularOperator(const std::string& what) : Error("singular operator: " + what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error("no convergence: " + what) {}
};

struct NotHurwitz : Error {
    explicit NotHurwitz(const std::string& what) : Error("matrix is not Hurwitz: " + what) {}
};

struct StabilizationFailed : Error {
    explicit StabilizationFailed(const std::string& what) : Error("stabilization failed: " + what) {}
};

// Riccati continuation lost the stabilizing solution before reaching the target.
struct CertificateAbsent : Error {
    explicit CertificateAbsent(const std::string& what) : Error("certificate absent: " + what) {}
};

// Lower-value weight Q - gamma^2 L'L is not positive definite.
struct RegularityViolated : Error {
    explicit RegularityViolated(const std::string& what) : Error("regularity violated: " + what) {}
};

struct NumericalBreakdown : Error {
    explicit NumericalBreakdown(const std::string& what) : Error("numerical breakdown: " + what) {}
};

struct BadBracket : Error {
    explicit BadBracket(const std::string& what) : Error("bad bisection bracket: " + what) {}
};

struct NotCertified : Error {
    explicit NotCertified(const std::string& what) : Error("certificate required: " + what) {}
};

struct NotScalar : Error {
    explicit NotScalar(const std::string& what) : Error("scalar system required: " + what) {}
};

struct NonzeroInitialState : Error {
    explicit NonzeroInitialState(const std::string& what) : Error("nonzero initial state: " + what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

}  // namespace lqgame
