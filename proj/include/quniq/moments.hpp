#pragma once

#include <optional>
#include <span>
#include <vector>

#include "quniq/weights.hpp"

namespace quniq {

/// log M_n = log sup_{t >= 1} t^n / W(t), with M_0 = 1.
///
/// The map s -> n s - log W(e^s) is concave on s >= 0, so golden-section search
/// finds its maximum; BandLimit and Tabulated weights are evaluated exactly.
/// Throws Divergent when the supremum is infinite (W grows no faster than t^n).
double moment(const Weight& w, int n);

/// Log-convex sequence M_0 = 1, M_1, ..., M_{n_max}, stored as logarithms,
/// together with mu_n = M_{n-1} / M_n.
class MomentSequence {
public:
    /// Moments of a weight. Applies the monotone envelope M_n <- max(M_n, M_{n-1})
    /// so that mu_n <= 1, then validates log-convexity (NotLogConvex beyond 1e-6).
    static MomentSequence from_weight(const Weight& w, int n_max);
    /// Directly supplied log M_0..log M_{n_max}; log M_0 must be 0.
    static MomentSequence from_log_moments(std::vector<double> log_m);
    /// Directly supplied ratios mu_1..mu_{n_max} (nonincreasing, in (0, 1]).
    static MomentSequence from_mu(std::span<const double> mu);

    int n_max() const { return static_cast<int>(log_m_.size()) - 1; }
    double log_m(int n) const { return log_m_.at(static_cast<std::size_t>(n)); }
    /// mu_n for 1 <= n <= n_max.
    double mu(int n) const;
    const std::vector<double>& log_moments() const { return log_m_; }
    std::vector<double> mu_values() const;  // mu_1..mu_{n_max}
    const std::optional<Weight>& source() const { return source_; }

    /// Largest violation of 2 log M_n <= log M_{n-1} + log M_{n+1}.
    double log_convexity_defect() const;

private:
    MomentSequence(std::vector<double> log_m, std::optional<Weight> source);
    void validate(double tolerance) const;

    std::vector<double> log_m_;
    std::vector<double> mu_;  // mu_[n] for n >= 1, mu_[0] unused
    std::optional<Weight> source_;
};

inline MomentSequence moment_sequence(const Weight& w, int n_max) {
    return MomentSequence::from_weight(w, n_max);
}

enum class RhoStatus { Ok, Truncated };

struct RhoValue {
    double log_rho;      // +inf when truncated
    double partial_sum;  // sum over n <= n_max of log(r mu_n) for r mu_n > 1
    RhoStatus status;
};

/// Ostrowski function log rho(r) = sum_{n : r mu_n > 1} log(r mu_n), r > 1.
RhoValue ostrowski_rho(const MomentSequence& m, double r);

enum class IntegralForm { Cauchy, Power };

struct LogIntegral {
    double value;         // +inf when the integral diverges
    double quad_error;    // reported quadrature error on the finite part
    double tail;          // analytic tail beyond the quadrature cutoff
};

/// CAUCHY: int_0^inf log W(t) / (1 + t^2) dt.  POWER: int_1^inf log W(t) / t^2 dt.
/// Divergence is decided from the family's declared asymptotics.
LogIntegral log_integral_detailed(const Weight& w, IntegralForm form);
inline double log_integral(const Weight& w, IntegralForm form) {
    return log_integral_detailed(w, form).value;
}

enum class PlsClass { Holds, Fails };
const char* to_string(PlsClass c);

/// PLS holds iff the Cauchy log-integral diverges. Throws Undecidable for a
/// tabulated weight with no declared extrapolation slope.
PlsClass pls_classify(const Weight& w);

}  // namespace quniq
