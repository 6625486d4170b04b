#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace quniq {

/// W = 1 on [0, band], +inf beyond.
struct BandLimit {
    double band;
};

/// log W(t) = c t^alpha for t >= 1, W = 1 on [0, 1).
struct PowerExp {
    double c;
    double alpha;
};

/// log W(t) = c t / log^delta(e + t).
struct EndPoint {
    double delta;
    double c;
};

/// Piecewise linear in (log t, log W). The first knot must be (0, 0) so that
/// W = 1 on [0, 1]. Beyond the last knot the declared slope is used; +inf means
/// W = +inf past the last knot. Without a declaration the last segment is
/// continued, but PLS classification is then undecidable.
struct Tabulated {
    std::vector<std::pair<double, double>> knots;
    std::optional<double> extrapolation_slope;
};

class Weight {
public:
    using Family = std::variant<BandLimit, PowerExp, EndPoint, Tabulated>;

    static Weight band_limit(double band);
    static Weight power_exp(double c, double alpha);
    static Weight end_point(double delta, double c);
    static Weight tabulated(std::vector<std::pair<double, double>> knots,
                            std::optional<double> extrapolation_slope);

    const Family& family() const { return family_; }
    std::string family_name() const;

    /// log W(t) for t >= 0; +inf past the finiteness radius.
    double log_value(double t) const;
    /// s -> log W(e^s); the convex profile the moment optimizer works on.
    double log_value_at_log(double s) const;
    /// sup { t : W(t) < inf }, possibly +inf.
    double finiteness_radius() const;
    /// Growth exponent recorded in the text record: alpha for PowerExp, 1 for
    /// EndPoint, +inf for BandLimit, the declared slope for Tabulated.
    std::optional<double> asymptotic_exponent() const;

private:
    explicit Weight(Family f) : family_(std::move(f)) {}
    Family family_;
};

inline double eval_log_weight(const Weight& w, double t) { return w.log_value(t); }

/// Samples s -> log W(e^s) at the given points and checks monotonicity and
/// midpoint convexity on consecutive triples. Returns the worst violation
/// (0 when the profile is convex and nondecreasing).
double weight_profile_violation(const Weight& w, std::span<const double> log_points);

/// Parses "band:2", "powerexp:1,0.5", "endpoint:1,1" (delta, c),
/// "tabulated:0/0;1/0.5;3/4@inf" (knots s/logW separated by ';', optional
/// '@slope', slope may be "inf").
Weight parse_weight_spec(std::string_view spec);
std::string weight_spec(const Weight& w);

/// Flat key=value record: family, parameters, n_max, asymptotic_exponent.
struct WeightRecord {
    Weight weight;
    int n_max;
};
std::string to_record(const Weight& w, int n_max);
WeightRecord from_record(std::string_view text);

}  // namespace quniq
