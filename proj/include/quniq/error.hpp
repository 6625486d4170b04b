#pragma once

#include <stdexcept>
#include <string>

namespace quniq {

enum class ErrorCode {
    InvalidArgument,
    Divergent,
    NotLogConvex,
    Undecidable,
    ExceedsNmax,
    InvalidWeight,
    HypothesisViolation,
    DegenerateScale,
    NotACover,
    TailTooFat,
    ZeroFunction,
    ParseError,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code says which contract failed.
// `level` carries the recursion level for ExceedsNmax raised inside theta_nd
// (1-based), and -1 otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, int level = -1)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), level_(level) {}

    ErrorCode code() const noexcept { return code_; }
    int level() const noexcept { return level_; }

private:
    ErrorCode code_;
    int level_;
};

}  // namespace quniq
