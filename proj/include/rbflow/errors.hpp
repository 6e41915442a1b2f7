#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbflow {

/// Every failure raised by the library names the module and operation that
/// raised it, so the CLI can report it verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string kind, std::string module, std::string operation, const std::string& message)
        : std::runtime_error("[" + module + "::" + operation + "] " + kind + ": " + message),
          kind_(std::move(kind)),
          module_(std::move(module)),
          operation_(std::move(operation)) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }

private:
    std::string kind_;
    std::string module_;
    std::string operation_;
};

#define RBFLOW_DEFINE_ERROR(Name)                                                               \
    class Name : public Error {                                                                 \
    public:                                                                                     \
        Name(std::string module, std::string operation, const std::string& message)             \
            : Error(#Name, std::move(module), std::move(operation), message) {}                 \
    }

RBFLOW_DEFINE_ERROR(PoleError);
RBFLOW_DEFINE_ERROR(DomainError);
RBFLOW_DEFINE_ERROR(PositivityError);
RBFLOW_DEFINE_ERROR(DegenerateFit);
RBFLOW_DEFINE_ERROR(UnknownScenario);
RBFLOW_DEFINE_ERROR(CFLViolation);
RBFLOW_DEFINE_ERROR(FloorBreach);
RBFLOW_DEFINE_ERROR(NonParabolic);
RBFLOW_DEFINE_ERROR(DeltaViolation);
RBFLOW_DEFINE_ERROR(HypothesisViolation);
RBFLOW_DEFINE_ERROR(UnsupportedModel);
RBFLOW_DEFINE_ERROR(InsufficientSamples);
RBFLOW_DEFINE_ERROR(IncompleteScenario);
RBFLOW_DEFINE_ERROR(ConfigError);

#undef RBFLOW_DEFINE_ERROR

/// The supplied profiles do not solve the system; carries the best residual.
class NoSolution : public Error {
public:
    NoSolution(std::string module, std::string operation, const std::string& message, double residual)
        : Error("NoSolution", std::move(module), std::move(operation), message), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace rbflow
