#include "quniq/moments.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "quniq/error.hpp"

namespace quniq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest log t the optimizer will explore (t ~ 1e304).
constexpr double kMaxLogT = 700.0;
constexpr double kGoldenTol = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double golden_section_max(const auto& f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > kGoldenTol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max({fc, fd, f(0.5 * (a + b))});
}

double smooth_moment(const Weight& w, int n) {
    const auto objective = [&](double s) { return n * s - w.log_value_at_log(s); };
    double hi = 1.0;
    double f_prev = objective(0.0);
    double f_hi = objective(hi);
    double lo = 0.0;
    while (f_hi > f_prev) {
        if (hi >= kMaxLogT) {
            throw Error(ErrorCode::Divergent, "moment objective still increasing at t = e^700");
        }
        lo = hi * 0.5;
        f_prev = f_hi;
        hi = std::min(2.0 * hi, kMaxLogT);
        f_hi = objective(hi);
    }
    // Concavity: the maximum lies in [lo, hi].
    const double best = golden_section_max(objective, lo, hi);
    return std::max(best, objective(0.0));
}

double tabulated_moment(const Tabulated& tab, int n) {
    double slope;
    if (tab.extrapolation_slope) {
        slope = *tab.extrapolation_slope;
    } else {
        const auto& a = tab.knots[tab.knots.size() - 2];
        const auto& b = tab.knots.back();
        slope = (b.second - a.second) / (b.first - a.first);
    }
    if (std::isfinite(slope) && n > slope * (1.0 + 1e-12)) {
        throw Error(ErrorCode::Divergent,
                    "tabulated weight grows like t^" + std::to_string(slope) + "; M_" + std::to_string(n) +
                        " is infinite");
    }
    double best = -kInf;
    for (const auto& [s, v] : tab.knots) best = std::max(best, n * s - v);
    return best;
}

}  // namespace

double moment(const Weight& w, int n) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "moment index must be nonnegative");
    if (n == 0) return 0.0;
    return std::visit(Overloaded{[n](const BandLimit& b) { return n * std::log(b.band); },
                                 [&](const PowerExp&) { return smooth_moment(w, n); },
                                 [&](const EndPoint&) { return smooth_moment(w, n); },
                                 [n](const Tabulated& tab) { return tabulated_moment(tab, n); }},
                      w.family());
}

MomentSequence::MomentSequence(std::vector<double> log_m, std::optional<Weight> source)
    : log_m_(std::move(log_m)), mu_(log_m_.size(), 0.0), source_(std::move(source)) {
    for (std::size_t n = 1; n < log_m_.size(); ++n) mu_[n] = std::exp(log_m_[n - 1] - log_m_[n]);
}

MomentSequence MomentSequence::from_weight(const Weight& w, int n_max) {
    if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
    std::vector<double> log_m(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        log_m[n] = std::max(moment(w, n), log_m[n - 1]);
    }
    MomentSequence seq(std::move(log_m), w);
    seq.validate(1e-6);
    return seq;
}

MomentSequence MomentSequence::from_log_moments(std::vector<double> log_m) {
    if (log_m.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least M_0 and M_1");
    if (log_m.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "log M_0 must be 0");
    for (std::size_t n = 1; n < log_m.size(); ++n) {
        if (!std::isfinite(log_m[n])) throw Error(ErrorCode::InvalidArgument, "log moments must be finite");
        if (log_m[n] < log_m[n - 1] - 1e-9 * std::max(1.0, std::abs(log_m[n]))) {
            throw Error(ErrorCode::InvalidArgument, "moments must be nondecreasing (mu_n <= 1)");
        }
    }
    MomentSequence seq(std::move(log_m), std::nullopt);
    seq.validate(1e-6);
    return seq;
}

MomentSequence MomentSequence::from_mu(std::span<const double> mu) {
    if (mu.empty()) throw Error(ErrorCode::InvalidArgument, "need at least mu_1");
    std::vector<double> log_m(mu.size() + 1, 0.0);
    for (std::size_t n = 1; n <= mu.size(); ++n) {
        const double v = mu[n - 1];
        if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mu_n must lie in (0, 1]");
        if (n > 1 && v > mu[n - 2] * (1.0 + 1e-12)) {
            throw Error(ErrorCode::InvalidArgument, "mu must be nonincreasing");
        }
        log_m[n] = log_m[n - 1] - std::log(v);
    }
    MomentSequence seq(std::move(log_m), std::nullopt);
    // Keep the exact ratios the caller supplied.
    for (std::size_t n = 1; n <= mu.size(); ++n) seq.mu_[n] = mu[n - 1];
    return seq;
}

double MomentSequence::mu(int n) const {
    if (n < 1 || n > n_max()) throw Error(ErrorCode::ExceedsNmax, "mu index out of range");
    return mu_[static_cast<std::size_t>(n)];
}

std::vector<double> MomentSequence::mu_values() const { return {mu_.begin() + 1, mu_.end()}; }

double MomentSequence::log_convexity_defect() const {
    double worst = 0.0;
    for (std::size_t n = 1; n + 1 < log_m_.size(); ++n) {
        worst = std::max(worst, 2.0 * log_m_[n] - log_m_[n - 1] - log_m_[n + 1]);
    }
    return worst;
}

void MomentSequence::validate(double tolerance) const {
    for (std::size_t n = 1; n + 1 < log_m_.size(); ++n) {
        const double defect = 2.0 * log_m_[n] - log_m_[n - 1] - log_m_[n + 1];
        if (defect > tolerance) {
            throw Error(ErrorCode::NotLogConvex,
                        "M_" + std::to_string(n) + "^2 > M_{n-1} M_{n+1} (log defect " + std::to_string(defect) + ")");
        }
    }
}

RhoValue ostrowski_rho(const MomentSequence& m, double r) {
    if (!(r > 1.0)) throw Error(ErrorCode::InvalidArgument, "ostrowski_rho needs r > 1");
    const double log_r = std::log(r);
    double sum = 0.0;
    for (int n = 1; n <= m.n_max(); ++n) {
        const double term = log_r + (m.log_m(n - 1) - m.log_m(n));
        if (term <= 0.0) return {sum, sum, RhoStatus::Ok};
        sum += term;
    }
    return {kInf, sum, RhoStatus::Truncated};
}

namespace {

// Quadrature of log W(e^s) * kernel(s) over [0, s_max], split at tabulated knots.
double integrate_profile(const Weight& w, const auto& kernel, double s_max, double& error) {
    std::vector<double> breaks{0.0};
    if (const auto* tab = std::get_if<Tabulated>(&w.family())) {
        for (const auto& [s, v] : tab->knots) {
            if (s > 0.0 && s < s_max) breaks.push_back(s);
        }
    }
    for (double s = 5.0; s < s_max; s += 5.0) breaks.push_back(s);
    breaks.push_back(s_max);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double total = 0.0;
    error = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        double piece_error = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double s) { return w.log_value_at_log(s) * kernel(s); }, breaks[i - 1], breaks[i], 15,
            1e-13, &piece_error);
        error += std::abs(piece_error);
    }
    return total;
}

// int_S^inf (a + k s) e^{-p s} ds
double linear_exp_tail(double a, double k, double p, double s) {
    return std::exp(-p * s) * ((a + k * s) / p + k / (p * p));
}

}  // namespace

LogIntegral log_integral_detailed(const Weight& w, IntegralForm form) {
    const bool divergent = std::visit(
        Overloaded{[](const BandLimit&) { return true; },
                   [](const PowerExp& p) { return p.alpha >= 1.0; },
                   [](const EndPoint& e) { return e.delta <= 1.0; },
                   [](const Tabulated& tab) {
                       return tab.extrapolation_slope && std::isinf(*tab.extrapolation_slope);
                   }},
        w.family());
    if (divergent) return {kInf, 0.0, kInf};

    // Cutoff in log t for the quadrature; the remainder is handled analytically.
    double s_cut = 40.0;
    if (const auto* tab = std::get_if<Tabulated>(&w.family())) {
        s_cut = std::max(s_cut, tab->knots.back().first);
    }

    double quad_error = 0.0;
    double value = 0.0;
    if (form == IntegralForm::Power) {
        value = integrate_profile(w, [](double s) { return std::exp(-s); }, s_cut, quad_error);
    } else {
        // [0, 1] in t, then t = e^s.
        double err01 = 0.0;
        value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double t) { return w.log_value(t) / (1.0 + t * t); }, 0.0, 1.0, 15, 1e-13, &err01);
        value += integrate_profile(
            w, [](double s) { return 1.0 / (std::exp(-s) + std::exp(s)); }, s_cut, quad_error);
        quad_error += std::abs(err01);
    }

    double tail = 0.0;
    if (const auto* p = std::get_if<PowerExp>(&w.family())) {
        // int_T^inf c t^{alpha-2} / (1 + t^{-2})^{[Cauchy]} dt, expanded in powers of t^{-2}.
        const double log_t = s_cut;
        const int terms = form == IntegralForm::Power ? 1 : 8;
        for (int k = 0; k < terms; ++k) {
            const double expo = p->alpha - 1.0 - 2.0 * k;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            tail += sign * p->c * std::exp(expo * log_t) / (-expo);
        }
    } else if (const auto* tab = std::get_if<Tabulated>(&w.family())) {
        double slope;
        if (tab->extrapolation_slope) {
            slope = *tab->extrapolation_slope;
        } else {
            const auto& a = tab->knots[tab->knots.size() - 2];
            const auto& b = tab->knots.back();
            slope = (b.second - a.second) / (b.first - a.first);
        }
        // Beyond the last knot log W(e^s) = intercept + slope s.
        const double intercept = tab->knots.back().second - slope * tab->knots.back().first;
        if (form == IntegralForm::Power) {
            tail = linear_exp_tail(intercept, slope, 1.0, s_cut);
        } else {
            // e^s / (1 + e^{2s}) = sum_j (-1)^j e^{-(2j+1) s}
            for (int j = 0; j < 8; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                tail += sign * linear_exp_tail(intercept, slope, 2.0 * j + 1.0, s_cut);
            }
        }
    }
    // EndPoint weights always diverge (delta <= 1), handled above.
    return {value + tail, quad_error, tail};
}

const char* to_string(PlsClass c) { return c == PlsClass::Holds ? "PLS_HOLDS" : "PLS_FAILS"; }

PlsClass pls_classify(const Weight& w) {
    if (const auto* tab = std::get_if<Tabulated>(&w.family())) {
        if (!tab->extrapolation_slope) {
            throw Error(ErrorCode::Undecidable, "tabulated weight has no declared extrapolation slope");
        }
    }
    // Decided from declared asymptotics: the Cauchy integral is +inf exactly in the
    // divergent families recognised by log_integral.
    return std::isinf(log_integral_detailed(w, IntegralForm::Cauchy).value) ? PlsClass::Holds
                                                                           : PlsClass::Fails;
}

}  // namespace quniq
