#include "quniq/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "quniq/error.hpp"

namespace quniq {

namespace {

// Slack for float rounding at endpoints that should coincide exactly.
double slack(double x) { return 1e-12 * std::max(1.0, std::abs(x)); }

// Left-to-right starts of length-len intervals covering every piece.
std::vector<double> greedy_starts(const std::vector<Interval>& pieces, double len) {
    std::vector<double> starts;
    double covered = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) {
        if (p.hi <= covered + slack(p.hi)) continue;
        double x = p.lo > covered + slack(p.lo) ? p.lo : covered;
        while (true) {
            starts.push_back(x);
            covered = x + len;
            if (covered >= p.hi - slack(p.hi)) break;
            x = covered;
        }
    }
    return starts;
}

IntervalSet band_part(const IntervalSet& s, int n) {
    return s.intersect(annulus(n));
}

}  // namespace

double omega_scale(const Weight& w, int n) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "scale index must be >= 0");
    const double en = std::exp(static_cast<double>(n));
    const double omega = w.log_value(en);
    if (!(omega > 0.0)) {
        throw Error(ErrorCode::DegenerateScale, "log W(e^" + std::to_string(n) + ") = 0");
    }
    if (omega > en / 4.0) {
        throw Error(ErrorCode::HypothesisViolation,
                    "log W(e^" + std::to_string(n) + ") exceeds e^" + std::to_string(n) + "/4");
    }
    return omega;
}

IntervalSet annulus(int n) {
    const double a = std::exp(static_cast<double>(n));
    const double b = std::exp(static_cast<double>(n) + 1.0);
    return IntervalSet({{-b, -a}, {a, b}});
}

double CoverFamily::norm() const {
    double total = 0.0;
    for (const auto& s : scales) {
        const double r = s.omega / std::exp(static_cast<double>(s.n));
        total += r * r * static_cast<double>(s.intervals.size());
    }
    return total;
}

std::size_t CoverFamily::card() const {
    std::size_t total = 0;
    for (const auto& s : scales) total += s.intervals.size();
    return total;
}

const ScaleCover* CoverFamily::scale(int n) const {
    for (const auto& s : scales) {
        if (s.n == n) return &s;
    }
    return nullptr;
}

bool CoverFamily::halves_disjoint() const {
    for (const auto& s : scales) {
        std::vector<Interval> halves;
        halves.reserve(s.intervals.size());
        for (const auto& j : s.intervals) halves.push_back(j.dilate(0.5));
        std::sort(halves.begin(), halves.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t i = 1; i < halves.size(); ++i) {
            if (halves[i].lo < halves[i - 1].hi - slack(halves[i].lo) * 1e3) return false;
        }
    }
    return true;
}

CoverFamily greedy_short_cover(const IntervalSet& q, const Weight& w, double t, int n_lo, int n_hi) {
    if (n_lo < 0 || n_hi < n_lo) throw Error(ErrorCode::InvalidArgument, "need 0 <= n_lo <= n_hi");
    const IntervalSet shifted = q.translated(-t);
    CoverFamily out;
    out.t = t;
    out.n_lo = n_lo;
    out.n_hi = n_hi;
    for (int n = n_lo; n <= n_hi; ++n) {
        const IntervalSet part = band_part(shifted, n);
        if (part.empty()) continue;
        ScaleCover sc{n, omega_scale(w, n), {}};
        for (double x : greedy_starts(part.intervals(), sc.omega)) sc.intervals.push_back({x, x + sc.omega});
        out.scales.push_back(std::move(sc));
    }
    return out;
}

SparsityEstimate sparsity_norm_estimate(const IntervalSet& q, const Weight& w,
                                        std::span<const double> translate_grid, int n_lo, int n_hi) {
    if (translate_grid.empty()) throw Error(ErrorCode::InvalidArgument, "translate grid is empty");
    std::vector<double> samples(translate_grid.begin(), translate_grid.end());
    const auto [gmin, gmax] = std::minmax_element(translate_grid.begin(), translate_grid.end());
    std::vector<double> extra;
    for (const auto& p : q.intervals()) {
        for (double a : {p.lo, p.hi}) {
            for (int m = n_lo; m <= n_hi + 1; ++m) {
                const double edge = std::exp(static_cast<double>(m));
                for (double t : {a - edge, a + edge}) {
                    if (t >= *gmin && t <= *gmax) extra.push_back(t);
                }
            }
        }
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    samples.insert(samples.end(), extra.begin(), extra.end());

    SparsityEstimate best{0.0, samples.front(), samples.size()};
    for (double t : samples) {
        const double v = greedy_short_cover(q, w, t, n_lo, n_hi).norm();
        if (v > best.value) {
            best.value = v;
            best.argmax_t = t;
        }
    }
    return best;
}

CoverFamily regularize_cover(const CoverFamily& c, const IntervalSet& q) {
    const IntervalSet shifted = q.translated(-c.t);
    CoverFamily out;
    out.t = c.t;
    out.n_lo = c.n_lo;
    out.n_hi = c.n_hi;
    out.regularized = true;
    for (int n = c.n_lo; n <= c.n_hi; ++n) {
        const IntervalSet part = band_part(shifted, n);
        if (part.empty()) continue;
        const ScaleCover* in = c.scale(n);
        if (in == nullptr) {
            throw Error(ErrorCode::NotACover, "scale " + std::to_string(n) + " has no intervals but meets q");
        }
        const IntervalSet covered(in->intervals);
        for (const auto& p : part.intervals()) {
            bool inside = false;
            for (const auto& j : covered.intervals()) {
                if (j.lo <= p.lo + slack(p.lo) && j.hi >= p.hi - slack(p.hi)) {
                    inside = true;
                    break;
                }
            }
            if (!inside) {
                throw Error(ErrorCode::NotACover, "scale " + std::to_string(n) + " misses part of [" +
                                                      std::to_string(p.lo) + ", " + std::to_string(p.hi) + "]");
            }
        }
        // Maximal Omega/2-separated points, taken left to right.
        const double omega = in->omega;
        ScaleCover sc{n, omega, {}};
        double last = -std::numeric_limits<double>::infinity();
        for (const auto& p : part.intervals()) {
            double x = std::max(p.lo, last + omega / 2.0);
            while (x <= p.hi) {
                sc.intervals.push_back({x - omega / 2.0, x + omega / 2.0});
                last = x;
                x = last + omega / 2.0;
            }
        }
        out.scales.push_back(std::move(sc));
    }
    return out;
}

std::int64_t phi_regular_cover_count(const IntervalSet& q, double t, double N, double ell) {
    if (!(N >= 1.0)) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    if (!(ell >= 1.0 && ell <= N)) throw Error(ErrorCode::InvalidArgument, "ell must lie in [1, N]");
    const IntervalSet window = q.intersect(t - N, t + N);
    return static_cast<std::int64_t>(greedy_starts(window.intervals(), ell).size());
}

double bourdyat_norm_bound(std::span<const double> phi_values, std::optional<double> exponent) {
    if (phi_values.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one phi sample");
    double sum = 0.0;
    for (std::size_t i = 0; i < phi_values.size(); ++i) {
        if (i > 0 && phi_values[i] < phi_values[i - 1]) {
            throw Error(ErrorCode::InvalidArgument, "phi samples must be nondecreasing");
        }
        const double n = static_cast<double>(i + 1);
        sum += phi_values[i] / (n * n);
    }
    double bound = 2.0 * sum;
    if (exponent) {
        const double delta = *exponent;
        if (delta >= 1.0) return std::numeric_limits<double>::infinity();
        const double n_max = static_cast<double>(phi_values.size());
        // phi(8(n+1)) <= C (8(n+1))^delta <= C 16^delta n^delta for n >= 1.
        const double c = phi_values.back() / std::pow(8.0 * (n_max + 1.0), delta);
        bound += 2.0 * c * std::pow(16.0, delta) * std::pow(n_max, delta - 1.0) / (1.0 - delta);
    }
    return bound;
}

double bump(const Interval& j, double x) {
    const double h = 0.5 * j.length();
    const double r = std::abs(x - j.center());
    if (r <= 2.0 * h) return 1.0;
    if (r >= 3.0 * h) return 0.0;
    return (3.0 * h - r) / h;
}

Majorant::Majorant(const CoverFamily& c, const Weight& w) {
    if (!c.halves_disjoint()) {
        throw Error(ErrorCode::InvalidArgument, "majorant needs a cover whose halves are disjoint");
    }
    double max_ratio = 0.0;
    for (const auto& s : c.scales) {
        const double height = w.log_value(std::exp(static_cast<double>(s.n) + 2.0));
        for (const auto& j : s.intervals) {
            bumps_.push_back({j, height, 2.0 / s.omega});
            max_support_ = std::max(max_support_, 3.0 * j.length());
        }
        if (!s.intervals.empty()) max_ratio = std::max(max_ratio, 2.0 * height / s.omega);
    }
    std::sort(bumps_.begin(), bumps_.end(),
              [](const Bump& a, const Bump& b) { return a.j.dilate(3.0).lo < b.j.dilate(3.0).lo; });
    lipschitz_ = 0.5 + tripled_overlap(c).max_count * max_ratio;
}

double Majorant::log_value(double x) const {
    double total = std::sqrt(std::max(1.0, std::abs(x)));
    // Only bumps whose support starts in [x - max_support, x] can reach x.
    auto it = std::lower_bound(bumps_.begin(), bumps_.end(), x - max_support_,
                               [](const Bump& b, double v) { return b.j.dilate(3.0).lo < v; });
    for (; it != bumps_.end() && it->j.dilate(3.0).lo <= x; ++it) {
        total += it->height * bump(it->j, x);
    }
    return total;
}

double Majorant::lipschitz_bound() const { return lipschitz_; }

double majorant_log_weight(const CoverFamily& c, const Weight& w, double x) {
    return Majorant(c, w).log_value(x);
}

std::optional<int> cutoff_scale(const Weight& w, int n_limit) {
    for (int n = 0; n <= n_limit; ++n) {
        if (w.log_value(std::exp(static_cast<double>(n))) >= 4.0) return n;
    }
    return std::nullopt;
}

OverlapStats tripled_overlap(const CoverFamily& c) {
    struct Item {
        Interval j3;
        int n;
    };
    std::vector<Item> items;
    for (const auto& s : c.scales) {
        for (const auto& j : s.intervals) items.push_back({j.dilate(3.0), s.n});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.j3.lo < b.j3.lo; });
    std::vector<int> count(items.size(), 1);
    OverlapStats out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t k = i + 1; k < items.size() && items[k].j3.lo <= items[i].j3.hi; ++k) {
            ++count[i];
            ++count[k];
            out.max_scale_gap = std::max(out.max_scale_gap, std::abs(items[i].n - items[k].n));
        }
    }
    for (int v : count) out.max_count = std::max(out.max_count, v);
    return out;
}

CoverFamily downgrade_cover(const CoverFamily& c, const Weight& w_tilde) {
    CoverFamily out;
    out.t = c.t;
    out.n_lo = c.n_lo;
    out.n_hi = c.n_hi;
    for (const auto& s : c.scales) {
        const double small = w_tilde.log_value(std::exp(static_cast<double>(s.n)));
        if (!(small > 0.0)) throw Error(ErrorCode::DegenerateScale, "downgraded weight has Omega = 0");
        if (small > s.omega * (1.0 + 1e-12)) {
            throw Error(ErrorCode::InvalidArgument, "downgraded weight exceeds the original at e^n");
        }
        const auto pieces = static_cast<std::size_t>(std::floor(s.omega / small)) + 1;
        ScaleCover sc{s.n, small, {}};
        for (const auto& j : s.intervals) {
            for (std::size_t k = 0; k < pieces; ++k) {
                const double lo = j.lo + static_cast<double>(k) * small;
                sc.intervals.push_back({lo, lo + small});
            }
        }
        out.scales.push_back(std::move(sc));
    }
    return out;
}

IntervalSet GammaDenseFamily::union_set() const { return IntervalSet(J); }

bool GammaDenseFamily::valid() const {
    if (J.size() != static_cast<std::size_t>(n_hi - n_lo + 1)) return false;
    for (std::size_t i = 0; i < J.size(); ++i) {
        const double n = static_cast<double>(n_lo) + static_cast<double>(i);
        if (J[i].length() < gamma - slack(gamma)) return false;
        if (J[i].hi < n || J[i].lo > n + 1.0) return false;
    }
    return true;
}

GammaDenseFamily gamma_dense_intervals(double gamma, int n_lo, int n_hi, Placement rule, std::uint64_t seed) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
    if (n_hi < n_lo) throw Error(ErrorCode::InvalidArgument, "empty window");
    GammaDenseFamily out{gamma, n_lo, n_hi, {}};
    std::mt19937_64 gen(seed);
    for (int n = n_lo; n <= n_hi; ++n) {
        double lo = n;
        if (rule == Placement::Random) {
            // 53 random bits, so the draw does not depend on the library's distribution code.
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            lo += u * (1.0 - gamma);
        }
        out.J.push_back({lo, lo + gamma});
    }
    return out;
}

}  // namespace quniq
