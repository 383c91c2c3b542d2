#pragma once

#include <stdexcept>
#include <string>

namespace shearband {

// Exit-code-2 family: bad parameters / violated model constraints.
struct ConstraintViolation : std::runtime_error {
    explicit ConstraintViolation(const std::string& what) : std::runtime_error(what) {}
};
struct DomainError : ConstraintViolation {
    explicit DomainError(const std::string& what) : ConstraintViolation(what) {}
};
struct Overdetermined : ConstraintViolation {
    explicit Overdetermined(const std::string& what) : ConstraintViolation(what) {}
};
struct DegenerateLambda : ConstraintViolation {
    explicit DegenerateLambda(const std::string& what) : ConstraintViolation(what) {}
};

// Exit-code-3 family: the computation itself failed.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};
struct StepUnderflow : NumericalFailure {
    explicit StepUnderflow(const std::string& what) : NumericalFailure(what) {}
};
struct BudgetExceeded : NumericalFailure {
    explicit BudgetExceeded(const std::string& what) : NumericalFailure(what) {}
};
struct NonFinite : NumericalFailure {
    explicit NonFinite(const std::string& what) : NumericalFailure(what) {}
};
struct EventNotFound : NumericalFailure {
    explicit EventNotFound(const std::string& what) : NumericalFailure(what) {}
};
struct NoConnection : NumericalFailure {
    explicit NoConnection(const std::string& what) : NumericalFailure(what) {}
};
struct SelectionFailed : NumericalFailure {
    explicit SelectionFailed(const std::string& what) : NumericalFailure(what) {}
};
struct FitIllConditioned : NumericalFailure {
    explicit FitIllConditioned(const std::string& what) : NumericalFailure(what) {}
};
struct ComplexSpectrum : NumericalFailure {
    explicit ComplexSpectrum(const std::string& what) : NumericalFailure(what) {}
};
struct PositivityLoss : NumericalFailure {
    explicit PositivityLoss(const std::string& what) : NumericalFailure(what) {}
};
struct StabilityViolation : NumericalFailure {
    explicit StabilityViolation(const std::string& what) : NumericalFailure(what) {}
};
struct ResolutionError : ConstraintViolation {
    explicit ResolutionError(const std::string& what) : ConstraintViolation(what) {}
};
struct ExtrapolationError : NumericalFailure {
    explicit ExtrapolationError(const std::string& what) : NumericalFailure(what) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace shearband
