#include "quniq/quasianalytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "quniq/error.hpp"

namespace quniq {

int bang_degree(const BangQuery& q) {
    if (!(q.neg_log_t >= 0.0) || !std::isfinite(q.neg_log_t)) {
        throw Error(ErrorCode::InvalidArgument, "-log t must be finite and nonnegative");
    }
    const int n_max = q.m.n_max();
    // Smallest integer n > lambda.
    const double first = std::floor(q.neg_log_t) + 1.0;
    if (first > n_max) {
        throw Error(ErrorCode::ExceedsNmax, "Bang sum starts at n = " + std::to_string(first) +
                                                " beyond n_max = " + std::to_string(n_max));
    }
    double sum = 0.0;
    for (int n = static_cast<int>(first); n <= n_max; ++n) {
        sum += q.m.mu(n);
        if (sum >= std::numbers::e) return n - 1;
    }
    throw Error(ErrorCode::ExceedsNmax, "partial sums of mu stay below e up to n_max = " + std::to_string(n_max));
}

double gamma_coeff(const MomentSequence& m, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "gamma_coeff needs n >= 1");
    if (n + 1 > m.n_max()) {
        throw Error(ErrorCode::ExceedsNmax,
                    "gamma_M(" + std::to_string(n) + ") needs M_" + std::to_string(n + 1));
    }
    double best = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double log_ratio = m.log_m(j + 1) + m.log_m(j - 1) - 2.0 * m.log_m(j);
        best = std::max(best, j * std::expm1(log_ratio));
    }
    return best;
}

LogScale big_gamma(const MomentSequence& m, int n) {
    return LogScale::from_log(std::log(4.0) + 4.0 + 4.0 * gamma_coeff(m, n));
}

LogScale theta_from_degree(int degree, LogScale log_big_gamma, double s) {
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::InvalidArgument, "s must lie in (0, 1]");
    if (degree == 0) return LogScale::from_log(0.0);
    const double per_factor = log_big_gamma.log_value() - std::log(s);
    return LogScale::from_log(2.0 * degree * per_factor);
}

ThetaResult theta_1d(const MomentSequence& m, double neg_log_t, double s) {
    const int degree = bang_degree({m, neg_log_t});
    ThetaResult out;
    out.bang_degrees.push_back(degree);
    out.lambdas.push_back(neg_log_t);
    out.s_values.push_back(s);
    if (degree == 0) {
        out.log_theta = theta_from_degree(0, {}, s);
        return out;
    }
    out.log_theta = theta_from_degree(degree, big_gamma(m, 2 * degree), s);
    return out;
}

ThetaResult theta_nd(const MomentSequence& m, int d, double neg_log_t, double s) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::InvalidArgument, "s must lie in (0, 1]");
    ThetaResult total;
    total.log_theta = LogScale::from_log(0.0);
    double lambda = neg_log_t;
    double level_s = s;
    for (int level = 1; level <= d; ++level) {
        const bool last = level == d;
        if (!last) level_s *= 0.5;
        ThetaResult step;
        try {
            step = theta_1d(m, lambda, level_s);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ExceedsNmax) {
                throw Error(ErrorCode::ExceedsNmax,
                            "recursion level " + std::to_string(level) + " of " + std::to_string(d) +
                                " (lambda = " + std::to_string(lambda) + "): " + e.what(),
                            level);
            }
            throw;
        }
        if (d == 1) return step;
        total.log_theta *= step.log_theta;
        total.bang_degrees.push_back(step.bang_degrees.front());
        total.lambdas.push_back(lambda);
        total.s_values.push_back(level_s);
        // t' = t / Theta_1: lambda grows by log Theta_1.
        lambda += step.log_theta.log_value();
    }
    return total;
}

double sobolev_constant(int d) { return std::ldexp(1.0, d); }

double default_shift_base(int d) { return std::max(std::numbers::e, 2.0 * sobolev_constant(d)); }

MomentSequence shifted_sequence(const MomentSequence& m, int d, double A) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    if (!(A > 1.0)) throw Error(ErrorCode::InvalidArgument, "A must exceed 1");
    if (m.n_max() < d + 1) throw Error(ErrorCode::ExceedsNmax, "n_max too small to shift by d");
    const double log_a = std::log(A);
    std::vector<double> log_m(static_cast<std::size_t>(m.n_max() - d) + 1);
    for (std::size_t n = 0; n < log_m.size(); ++n) {
        log_m[n] = n * log_a + m.log_m(static_cast<int>(n) + d) - m.log_m(d);
    }
    log_m[0] = 0.0;
    return MomentSequence::from_log_moments(std::move(log_m));
}

PlsConstant pls_constant(const Weight& w, int d, double c_w, double gamma, double A, int n_max) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    if (!(c_w >= 1.0) || !std::isfinite(c_w)) throw Error(ErrorCode::InvalidArgument, "C_W must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
    if (!(A > 1.0) || !std::isfinite(A)) throw Error(ErrorCode::InvalidArgument, "A must exceed 1");
    try {
        if (pls_classify(w) != PlsClass::Holds) {
            throw Error(ErrorCode::InvalidWeight, "weight has a convergent logarithmic integral (PLS fails)");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Undecidable) throw Error(ErrorCode::InvalidWeight, e.what());
        throw;
    }
    const auto m = MomentSequence::from_weight(w, n_max);
    const auto shifted = shifted_sequence(m, d, A);
    PlsConstant out;
    out.A = A;
    out.n_max = n_max;
    out.lambda = std::log(c_w) + (1.0 + d) * std::log(A) + m.log_m(d);
    out.theta = theta_nd(shifted, d, out.lambda, gamma / 2.0);
    // log C = 1/2 log(4/gamma) + log Theta
    out.log_c = LogScale::from_log(0.5 * std::log(4.0 / gamma)) * out.theta.log_theta;
    return out;
}

}  // namespace quniq
