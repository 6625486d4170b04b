#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "quniq/intervals.hpp"
#include "quniq/weights.hpp"

namespace quniq {

/// Omega_n = log W(e^n). Throws HypothesisViolation when Omega_n > e^n / 4 and
/// DegenerateScale when Omega_n <= 0.
double omega_scale(const Weight& w, int n);

/// Two-sided dyadic-exponential band [-e^{n+1}, -e^n] u [e^n, e^{n+1}].
IntervalSet annulus(int n);

struct ScaleCover {
    int n;
    double omega;
    std::vector<Interval> intervals;  // each of length omega, sorted by lo
};

/// W-short cover of q - t, one entry per scale that needed intervals.
struct CoverFamily {
    double t = 0.0;
    int n_lo = 0;
    int n_hi = -1;  // scales n_lo..n_hi were requested
    bool regularized = false;
    std::vector<ScaleCover> scales;

    /// sum_n (Omega_n / e^n)^2 card(J_n)
    double norm() const;
    std::size_t card() const;
    const ScaleCover* scale(int n) const;
    /// True when the halves of the intervals at each scale have disjoint interiors.
    bool halves_disjoint() const;
};

/// Covers (q - t) n annulus(n) for n_lo <= n <= n_hi by left-to-right greedy
/// placement of length-Omega_n intervals. Omega_n is only evaluated for bands
/// that meet q - t.
CoverFamily greedy_short_cover(const IntervalSet& q, const Weight& w, double t, int n_lo, int n_hi);

enum class EstimateStatus { LowerBound };

struct SparsityEstimate {
    double value;
    double argmax_t;
    std::size_t samples;
    EstimateStatus status = EstimateStatus::LowerBound;
};

/// max over sampled t of the greedy cover norm. Samples are the grid plus every
/// translate that puts a band edge on an endpoint of q, clipped to the grid hull.
SparsityEstimate sparsity_norm_estimate(const IntervalSet& q, const Weight& w,
                                        std::span<const double> translate_grid, int n_lo, int n_hi);

/// Replaces each scale by intervals centered on a maximal Omega_n/2-separated
/// subset of (q - c.t) n annulus(n). Throws NotACover if c misses part of q.
CoverFamily regularize_cover(const CoverFamily& c, const IntervalSet& q);

/// Minimal number of length-ell intervals covering q n [t - N, t + N].
std::int64_t phi_regular_cover_count(const IntervalSet& q, double t, double N, double ell);

/// 2 sum_{n=1}^{n_max} phi(8(n+1)) / n^2 for phi_values[n-1] = phi(8(n+1)).
/// With an exponent delta (phi(t) <= C t^delta, C fitted at the last sample)
/// the tail 2 C 16^delta n_max^{delta-1} / (1 - delta) is added; +inf for delta >= 1.
double bourdyat_norm_bound(std::span<const double> phi_values, std::optional<double> exponent = {});

/// Trapezoid bump: 1 on 2J, 0 outside 3J, linear in between.
double bump(const Interval& j, double x);

/// log W~(x) = sqrt(max(1, |x|)) + sum_n sum_{J in J_n} Omega_{n+2} eta_J(x).
class Majorant {
public:
    /// Throws InvalidArgument unless the cover has disjoint halves.
    Majorant(const CoverFamily& c, const Weight& w);

    double log_value(double x) const;
    /// 1/2 + K max_n 2 Omega_{n+2} / Omega_n, K the largest number of tripled
    /// intervals that meet one tripled interval.
    double lipschitz_bound() const;

private:
    struct Bump {
        Interval j;
        double height;
        double slope;
    };
    std::vector<Bump> bumps_;  // sorted by support start
    double max_support_ = 0.0;
    double lipschitz_ = 0.5;
};

double majorant_log_weight(const CoverFamily& c, const Weight& w, double x);

/// Smallest n >= 0 with Omega_n >= 4, scanning up to n_limit.
std::optional<int> cutoff_scale(const Weight& w, int n_limit);

struct OverlapStats {
    int max_count = 0;      // tripled intervals meeting a single tripled interval, itself included
    int max_scale_gap = 0;  // largest |n - m| over meeting pairs
};
OverlapStats tripled_overlap(const CoverFamily& c);

/// Re-covers each J in scale n with floor(Omega_n / Omega~_n) + 1 intervals of
/// length Omega~_n = log W~(e^n). Needs W~ <= W at every e^n used.
CoverFamily downgrade_cover(const CoverFamily& c, const Weight& w_tilde);

enum class Placement { Left, Random };

struct GammaDenseFamily {
    double gamma;
    int n_lo;
    int n_hi;
    std::vector<Interval> J;  // J[i] for n = n_lo + i

    IntervalSet union_set() const;
    /// Both defining conditions (length >= gamma, meets [n, n+1]) at every n.
    bool valid() const;
};

/// J_n of length gamma. Left puts J_n = [n, n + gamma]; Random draws the left
/// endpoint uniformly in [n, n + 1 - gamma] from a 64-bit Mersenne twister.
GammaDenseFamily gamma_dense_intervals(double gamma, int n_lo, int n_hi, Placement rule,
                                       std::uint64_t seed = 0);

}  // namespace quniq
