#ifndef FRECHET_ERRORS_HPP
#define FRECHET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frechet {

// Error classes map onto the CLI exit-code contract:
// invalid_input -> exit 1, numerical -> exit 2.
enum class ErrorClass { invalid_input, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string kind, const std::string& msg)
        : std::runtime_error(msg), cls_(cls), kind_(std::move(kind)) {}
    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorClass cls_;
    std::string kind_;
};

struct InvalidParams : Error {
    explicit InvalidParams(const std::string& msg)
        : Error(ErrorClass::invalid_input, "InvalidParams", msg) {}
};

struct UnnormalizedCustomPdf : Error {
    explicit UnnormalizedCustomPdf(const std::string& msg)
        : Error(ErrorClass::invalid_input, "UnnormalizedCustomPdf", msg) {}
};

struct DivergentIntegral : Error {
    explicit DivergentIntegral(const std::string& msg)
        : Error(ErrorClass::numerical, "DivergentIntegral", msg) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg)
        : Error(ErrorClass::numerical, "QuadratureFailure", msg) {}
};

struct NoBracket : Error {
    explicit NoBracket(const std::string& msg)
        : Error(ErrorClass::numerical, "NoBracket", msg) {}
};

struct NearSingularP : Error {
    explicit NearSingularP(const std::string& msg)
        : Error(ErrorClass::numerical, "NearSingularP", msg) {}
};

struct NonDifferentiablePdf : Error {
    explicit NonDifferentiablePdf(const std::string& msg)
        : Error(ErrorClass::numerical, "NonDifferentiablePdf", msg) {}
};

struct MomentDiverges : Error {
    explicit MomentDiverges(const std::string& msg)
        : Error(ErrorClass::numerical, "MomentDiverges", msg) {}
};

struct EmptyDomainIntersection : Error {
    explicit EmptyDomainIntersection(const std::string& msg)
        : Error(ErrorClass::invalid_input, "EmptyDomainIntersection", msg) {}
};

struct NormalizationMismatch : Error {
    explicit NormalizationMismatch(const std::string& msg)
        : Error(ErrorClass::numerical, "NormalizationMismatch", msg) {}
};

struct InvalidP : Error {
    explicit InvalidP(const std::string& msg)
        : Error(ErrorClass::invalid_input, "InvalidP", msg) {}
};

} // namespace frechet

#endif
