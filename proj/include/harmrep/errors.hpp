#pragma once

#include <stdexcept>
#include <string>

namespace harmrep {

enum class ExitCode : int { ok = 0, validation = 2, numerical = 3, convention = 4 };

// Base for all pipeline failures; carries the stage that raised it.
class Error : public std::runtime_error {
public:
    Error(ExitCode code, std::string stage, const std::string& what)
        : std::runtime_error("[" + stage + "] " + what), code_(code), stage_(std::move(stage)) {}
    ExitCode code() const { return code_; }
    const std::string& stage() const { return stage_; }

private:
    ExitCode code_;
    std::string stage_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string stage, const std::string& what) : Error(ExitCode::validation, std::move(stage), what) {}
};

class NumericalError : public Error {
public:
    NumericalError(std::string stage, const std::string& what) : Error(ExitCode::numerical, std::move(stage), what) {}
};

class ConventionError : public Error {
public:
    ConventionError(std::string stage, const std::string& what) : Error(ExitCode::convention, std::move(stage), what) {}
};

}  // namespace harmrep
