#pragma once

#include <cmath>
#include <compare>

namespace quniq {

/// A positive quantity stored by its natural logarithm.
///
/// Remez-type constants are tower exponentials, so even their logarithms can
/// leave double range. When `nested` is set, `value` holds log(log X) instead
/// of log X. Multiplication of underlying quantities is addition of logs.
struct LogScale {
    double value = 0.0;
    bool nested = false;

    static LogScale from_log(double log_value);
    static LogScale from_log_log(double log_log_value) { return {log_log_value, true}; }

    /// log X, possibly +inf when the quantity is nested beyond double range.
    double log_value() const { return nested ? std::exp(value) : value; }

    LogScale operator*(const LogScale& other) const;
    LogScale& operator*=(const LogScale& other) { return *this = *this * other; }

    std::partial_ordering operator<=>(const LogScale& other) const;
    bool operator==(const LogScale& other) const { return (*this <=> other) == 0; }
};

}  // namespace quniq
