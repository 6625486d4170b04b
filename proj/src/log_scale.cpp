#include "quniq/log_scale.hpp"

#include <algorithm>
#include <limits>

#include "quniq/error.hpp"

namespace quniq {

namespace {
// Beyond this a log value is moved one nesting level up.
constexpr double kNestThreshold = 1e250;
}  // namespace

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Divergent: return "DIVERGENT";
        case ErrorCode::NotLogConvex: return "NOT_LOG_CONVEX";
        case ErrorCode::Undecidable: return "UNDECIDABLE";
        case ErrorCode::ExceedsNmax: return "EXCEEDS_NMAX";
        case ErrorCode::InvalidWeight: return "INVALID_WEIGHT";
        case ErrorCode::HypothesisViolation: return "HYPOTHESIS_VIOLATION";
        case ErrorCode::DegenerateScale: return "DEGENERATE_SCALE";
        case ErrorCode::NotACover: return "NOT_A_COVER";
        case ErrorCode::TailTooFat: return "TAIL_TOO_FAT";
        case ErrorCode::ZeroFunction: return "ZERO_FUNCTION";
        case ErrorCode::ParseError: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

LogScale LogScale::from_log(double log_value) {
    if (log_value > kNestThreshold) {
        return {std::log(log_value), true};
    }
    return {log_value, false};
}

LogScale LogScale::operator*(const LogScale& other) const {
    if (!nested && !other.nested) {
        return from_log(value + other.value);
    }
    if (nested && other.nested) {
        const double hi = std::max(value, other.value);
        const double lo = std::min(value, other.value);
        return {hi + std::log1p(std::exp(lo - hi)), true};
    }
    const LogScale& big = nested ? *this : other;
    const LogScale& small = nested ? other : *this;
    // log(e^{big} + small) = big + log1p(small / e^{big}); e^{big} > 1e250 here.
    const double ratio = small.value / std::exp(big.value);
    return {big.value + std::log1p(ratio), true};
}

std::partial_ordering LogScale::operator<=>(const LogScale& other) const {
    if (nested == other.nested) {
        return value <=> other.value;
    }
    const LogScale& plain = nested ? other : *this;
    const LogScale& deep = nested ? *this : other;
    // A plain log value <= 0 is below every nested one (nested means log X > 1e250).
    const double plain_as_nested =
        plain.value > 0.0 ? std::log(plain.value) : -std::numeric_limits<double>::infinity();
    const auto cmp = plain_as_nested <=> deep.value;
    if (nested) {
        // *this is the deep one: reverse the comparison.
        if (cmp == std::partial_ordering::less) return std::partial_ordering::greater;
        if (cmp == std::partial_ordering::greater) return std::partial_ordering::less;
    }
    return cmp;
}

}  // namespace quniq
