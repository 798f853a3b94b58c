#pragma once
#include <stdexcept>
#include <string>

namespace prefopt {

// exit codes: 0 ok, 2 config/usage, 3 numerical failure, 4 budget exhausted
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 2;
};

struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 3;
};

struct EvaluatorFault : std::runtime_error {
    explicit EvaluatorFault(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 3;
};

struct BudgetExhausted : std::runtime_error {
    explicit BudgetExhausted(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 4;
};

} // namespace prefopt
