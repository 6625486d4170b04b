#include "quniq/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include "quniq/error.hpp"

namespace quniq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform on (0, 1] from the top 53 bits, independent of the library's distributions.
double uniform01(std::mt19937_64& gen) { return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; }

cplx gaussian(std::mt19937_64& gen) {
    const double r = std::sqrt(-2.0 * std::log(uniform01(gen)));
    const double theta = kTwoPi * uniform01(gen);
    // Unit variance overall: each part has variance 1/2.
    return std::polar(r / std::numbers::sqrt2, theta);
}

double log_sum_exp(const std::vector<double>& v) {
    double hi = -kInf;
    for (double x : v) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double x : v) s += std::exp(x - hi);
    return hi + std::log(s);
}

double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

void check_mask(const Mask& m, std::int64_t N, const char* what) {
    if (static_cast<std::int64_t>(m.size()) != N) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " mask must have length N");
    }
    if (std::none_of(m.begin(), m.end(), [](bool b) { return b; })) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " mask is empty");
    }
}

// sign and log|sin x / x|, with the removable singularity at 0 handled by series.
std::pair<int, double> log_sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return {1, std::log1p(-x2 / 6.0 + x2 * x2 / 120.0)};
    }
    const double s = std::sin(ax) / ax;
    if (s == 0.0) return {0, -kInf};
    return {s > 0.0 ? 1 : -1, std::log(std::abs(s))};
}

}  // namespace

std::vector<cplx> unitary_dft(std::span<const cplx> f) {
    if (f.size() < 2) return {f.begin(), f.end()};  // kissfft does not handle N = 1
    Eigen::FFT<double> fft;
    std::vector<cplx> in(f.begin(), f.end()), out;
    fft.fwd(out, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(f.size()));
    for (auto& z : out) z *= scale;
    return out;
}

std::vector<cplx> unitary_idft(std::span<const cplx> fhat) {
    if (fhat.size() < 2) return {fhat.begin(), fhat.end()};
    Eigen::FFT<double> fft;
    std::vector<cplx> in(fhat.begin(), fhat.end()), out;
    fft.inv(out, in);  // includes 1/N
    const double scale = std::sqrt(static_cast<double>(fhat.size()));
    for (auto& z : out) z *= scale;
    return out;
}

Mask mask_from_indices(std::int64_t N, std::span<const std::int64_t> indices) {
    Mask m(static_cast<std::size_t>(N), false);
    for (auto i : indices) {
        if (i < 0 || i >= N) throw Error(ErrorCode::InvalidArgument, "mask index out of range");
        m[static_cast<std::size_t>(i)] = true;
    }
    return m;
}

std::vector<std::int64_t> mask_indices(const Mask& m) {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) out.push_back(static_cast<std::int64_t>(i));
    }
    return out;
}

Mask space_mask_from_set(std::int64_t N, const IntervalSet& e) {
    Mask m(static_cast<std::size_t>(N), false);
    for (std::int64_t j = 0; j < N; ++j) {
        m[static_cast<std::size_t>(j)] = e.contains(static_cast<double>(j) / static_cast<double>(N));
    }
    return m;
}

const char* to_string(SvdMethod m) { return m == SvdMethod::FullSvd ? "FULL_SVD" : "ITERATIVE"; }

DiscreteExperiment observability_constant(std::int64_t N, const Mask& freq_mask, const Mask& space_mask,
                                          SvdMethod method, std::uint64_t seed) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
    check_mask(freq_mask, N, "frequency");
    check_mask(space_mask, N, "space");
    if (method == SvdMethod::FullSvd && N > kFullSvdLimit) {
        throw Error(ErrorCode::InvalidArgument, "FULL_SVD needs N <= " + std::to_string(kFullSvdLimit));
    }
    const auto start = std::chrono::steady_clock::now();
    const auto q = mask_indices(freq_mask);
    const auto e = mask_indices(space_mask);

    DiscreteExperiment out;
    out.N = N;
    out.q_count = static_cast<std::int64_t>(q.size());
    out.e_count = static_cast<std::int64_t>(e.size());
    out.method = method;
    out.seed = seed;

    if (e.size() >= q.size()) {
        const auto rows = static_cast<Eigen::Index>(e.size());
        const auto cols = static_cast<Eigen::Index>(q.size());
        Eigen::MatrixXcd a(rows, cols);
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                // Reduce jk mod N in integers so the phase keeps full precision.
                const auto phase = (e[static_cast<std::size_t>(r)] * q[static_cast<std::size_t>(c)]) % N;
                a(r, c) = std::polar(inv_sqrt_n, kTwoPi * static_cast<double>(phase) / static_cast<double>(N));
            }
        }
        if (method == SvdMethod::FullSvd) {
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
            out.sigma_min = svd.singularValues().minCoeff();
        } else {
            // Inverse iteration on A^H A = R^H R.
            const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
            const Eigen::MatrixXcd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
            const auto upper = r.triangularView<Eigen::Upper>();
            std::mt19937_64 gen(seed);
            double best_rho = kInf;
            double best_residual = kInf;
            bool best_certified = false;
            for (int restart = 0; restart < 3; ++restart) {
                Eigen::VectorXcd v(cols);
                for (Eigen::Index i = 0; i < cols; ++i) v(i) = gaussian(gen);
                v.normalize();
                double rho = (r * v).squaredNorm();
                bool certified = false;
                for (int it = 0; it < 20000; ++it) {
                    Eigen::VectorXcd y = upper.adjoint().solve(v);
                    Eigen::VectorXcd x = upper.solve(y);
                    const double nx = x.norm();
                    if (!std::isfinite(nx) || nx == 0.0) break;
                    v = x / nx;
                    const Eigen::VectorXcd rv = r * v;
                    rho = rv.squaredNorm();
                    const double res = (r.adjoint() * rv - rho * v).norm();
                    if (res <= 1e-9 * rho) {
                        certified = true;
                        break;
                    }
                }
                const double residual = (a.adjoint() * (a * v) - rho * v).norm();
                if (rho < best_rho) {
                    best_rho = rho;
                    best_residual = residual;
                    best_certified = certified;
                }
            }
            out.sigma_min = std::sqrt(std::max(best_rho, 0.0));
            out.residual = best_residual;
            out.certified = best_certified;
        }
    }
    out.sigma_min = std::min(out.sigma_min, 1.0);
    out.singular = out.sigma_min < kSingularThreshold;
    out.recovery_constant = out.sigma_min > 0.0 ? 1.0 / out.sigma_min : kInf;
    out.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

SynthResult synth_from_profile(const SpectralProfile& p, std::int64_t N, std::uint64_t seed) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
    std::mt19937_64 gen(seed);
    SynthResult out;
    out.coefficients.assign(static_cast<std::size_t>(N), cplx{});
    if (p.mode == ProfileMode::Mask) {
        check_mask(p.freq_mask, N, "frequency");
        for (std::int64_t k = 0; k < N; ++k) {
            const cplx g = gaussian(gen);
            if (p.freq_mask[static_cast<std::size_t>(k)]) out.coefficients[static_cast<std::size_t>(k)] = g;
        }
        out.samples = unitary_idft(out.coefficients);
        return out;
    }

    if (!p.weight) throw Error(ErrorCode::InvalidArgument, "decay profile needs a weight");
    if (!(p.c_w >= 1.0) || !std::isfinite(p.c_w)) throw Error(ErrorCode::InvalidArgument, "C_W must be >= 1");
    std::vector<cplx> g(static_cast<std::size_t>(N));
    std::vector<double> log_w(static_cast<std::size_t>(N));
    for (std::int64_t k = 0; k < N; ++k) {
        g[static_cast<std::size_t>(k)] = gaussian(gen);
        log_w[static_cast<std::size_t>(k)] =
            p.weight->log_value(static_cast<double>(std::abs(signed_frequency(k, N))));
    }
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::isfinite(log_w[k]) && std::abs(g[k]) > 0.0) live.push_back(k);
    }
    if (live.empty()) throw Error(ErrorCode::InvalidArgument, "weight is infinite on every frequency");

    // log of sum |c|^2 W^2 / sum |c|^2 for c = g W^{-beta}; nonincreasing in beta.
    auto log_norm = [&](double beta, bool weighted) {
        std::vector<double> terms;
        terms.reserve(live.size());
        for (auto k : live) {
            const double base = 2.0 * std::log(std::abs(g[k])) - 2.0 * beta * log_w[k];
            terms.push_back(weighted ? base + 2.0 * log_w[k] : base);
        }
        return log_sum_exp(terms);
    };
    auto log_ratio = [&](double beta) { return log_norm(beta, true) - log_norm(beta, false); };

    const double cap = 2.0 * std::log(p.c_w);
    const double target = std::log(0.995) + cap;
    double lo = -4.0, hi = 64.0;
    double beta = 0.0;
    if (log_ratio(hi) > cap + 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "C_W is too small for this weight on the frequency range");
    }
    if (log_ratio(lo) >= target && log_ratio(hi) <= target) {
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (log_ratio(mid) > target ? lo : hi) = mid;
        }
        beta = hi;
    } else if (log_ratio(0.0) > cap) {
        beta = hi;
    }
    const double log_total = log_norm(beta, false);
    for (auto k : live) {
        const double mag = std::exp(-beta * log_w[k] - 0.5 * log_total);
        out.coefficients[k] = g[k] / std::abs(g[k]) * (std::abs(g[k]) * mag);
    }
    out.beta = beta;
    out.ratio = std::exp(log_ratio(beta));
    out.samples = unitary_idft(out.coefficients);
    return out;
}

double recovery_ratio(std::span<const cplx> samples, const Mask& space_mask) {
    if (space_mask.size() != samples.size()) {
        throw Error(ErrorCode::InvalidArgument, "space mask must match the sample count");
    }
    double total = 0.0, inside = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double a = std::norm(samples[j]);
        total += a;
        if (space_mask[j]) inside += a;
    }
    if (total == 0.0) throw Error(ErrorCode::ZeroFunction, "samples are identically zero");
    return std::sqrt(inside / total);
}

int paley_wiener_n0(const MomentSequence& m, double epsilon) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    const int n_max = m.n_max();
    double tail = 0.0;
    int best = -1;
    // Walk down from n_max; the tail only grows, so the last hit is the smallest n0.
    for (int n = n_max; n >= 10; --n) {
        tail += m.mu(n);
        if (tail < epsilon) best = n;
        else break;
    }
    if (best < 0) {
        throw Error(ErrorCode::TailTooFat,
                    "no n0 in [10, " + std::to_string(n_max) + "] has mu tail below " + std::to_string(epsilon));
    }
    return best;
}

PaleyWienerProfile paley_wiener_profile(const MomentSequence& m, double epsilon, std::optional<int> n0,
                                        std::span<const double> xi_grid) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    PaleyWienerProfile out;
    out.epsilon = epsilon;
    out.n_max = m.n_max();
    out.n0 = n0 ? *n0 : paley_wiener_n0(m, epsilon);
    if (out.n0 < 1 || out.n0 > out.n_max) throw Error(ErrorCode::InvalidArgument, "n0 must lie in [1, n_max]");
    for (int n = out.n0; n <= out.n_max; ++n) out.tail_sum += m.mu(n);
    if (out.tail_sum >= epsilon) {
        throw Error(ErrorCode::TailTooFat, "sum of mu_n from n0 = " + std::to_string(out.n0) + " is " +
                                               std::to_string(out.tail_sum) + " >= epsilon");
    }
    out.log_m0 = m.log_m(out.n0 - 1);
    out.support_halfwidth = (2.0 * epsilon + out.tail_sum) / kTwoPi;

    const double a = epsilon / out.n0;
    std::vector<double> mu;
    for (int n = out.n0; n <= out.n_max; ++n) mu.push_back(m.mu(n));
    out.values.reserve(xi_grid.size());
    for (double xi : xi_grid) {
        auto [s0, l0] = log_sinc(a * xi);
        int sign = s0 == 0 ? 0 : 1;  // even power 2 n0
        double log_abs = 2.0 * out.n0 * l0;
        for (double mu_n : mu) {
            if (sign == 0) break;
            const auto [s, l] = log_sinc(mu_n * xi);
            sign *= s;
            log_abs += l;
        }
        out.values.push_back(sign == 0 ? 0.0 : sign * std::exp(out.log_m0 + log_abs));
    }
    return out;
}

CenteredSamples centered_inverse_transform(std::span<const double> fhat, double dxi) {
    const auto n = static_cast<std::int64_t>(fhat.size());
    if (n < 2 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "grid size must be even");
    if (!(dxi > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
    const std::int64_t half = n / 2;
    std::vector<cplx> g(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) g[static_cast<std::size_t>((k - half + n) % n)] = fhat[static_cast<std::size_t>(k)];
    Eigen::FFT<double> fft;
    std::vector<cplx> big;
    fft.inv(big, g);  // (1/N) sum_k g_k e^{2 pi i jk/N}
    CenteredSamples out;
    out.x.resize(static_cast<std::size_t>(n));
    out.f.resize(static_cast<std::size_t>(n));
    const double scale = dxi * static_cast<double>(n);
    for (std::int64_t j = 0; j < n; ++j) {
        out.x[static_cast<std::size_t>(j)] = static_cast<double>(j - half) / (static_cast<double>(n) * dxi);
        out.f[static_cast<std::size_t>(j)] = scale * big[static_cast<std::size_t>((j - half + n) % n)];
    }
    return out;
}

WeightedEnergy weighted_energy(std::span<const double> f_hat, const Weight& w, std::span<const double> xi_grid) {
    if (f_hat.size() != xi_grid.size() || f_hat.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "need matching value and grid arrays of length >= 2");
    }
    std::vector<double> terms;
    terms.reserve(f_hat.size());
    const std::size_t last = f_hat.size() - 1;
    for (std::size_t k = 0; k <= last; ++k) {
        if (f_hat[k] == 0.0) continue;
        const double left = k > 0 ? xi_grid[k] - xi_grid[k - 1] : 0.0;
        const double right = k < last ? xi_grid[k + 1] - xi_grid[k] : 0.0;
        const double weight = 0.5 * (left + right);
        if (!(weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid must be increasing");
        const double lw = w.log_value(std::abs(xi_grid[k]));
        terms.push_back(std::log(weight) + 2.0 * std::log(std::abs(f_hat[k])) + 2.0 * lw);
    }
    return {log_sum_exp(terms), kInf};
}

WeightedEnergy weighted_energy(const PaleyWienerProfile& p, const Weight& w, std::span<const double> xi_grid) {
    auto out = weighted_energy(p.values, w, xi_grid);
    double r = 0.0;
    for (double xi : xi_grid) r = std::max(r, std::abs(xi));
    // For n0 <= n <= n_max, |xi|^n |fhat| <= M_n (n0/eps)^{2 n0} |xi|^{-(n0+1)}. A supporting
    // line of log W at |xi| with slope in [n, n+1) gives W(|xi|) <= |xi|^{n+1} / M_n, so
    // |fhat| W <= (n0/eps)^{2 n0} |xi|^{-n0} and both tails together are at most
    // 2 (n0/eps)^{4 n0} R^{1 - 2 n0} / (2 n0 - 1).
    const double n0 = p.n0;
    if (r > 1.0 && p.n0 >= 1) {
        out.log_tail_bound = std::log(2.0) + 4.0 * n0 * std::log(n0 / p.epsilon) + (1.0 - 2.0 * n0) * std::log(r) -
                             std::log(2.0 * n0 - 1.0);
    }
    return out;
}

PlancherelCheck plancherel_derivative_check(std::span<const cplx> samples, int order) {
    if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
    const auto n = static_cast<std::int64_t>(samples.size());
    const double f_norm = norm2(samples);
    if (f_norm == 0.0) throw Error(ErrorCode::ZeroFunction, "samples are identically zero");
    const auto fhat = unitary_dft(samples);
    std::vector<cplx> dhat(fhat.size());
    double spectral = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        const double xi = static_cast<double>(signed_frequency(k, n));
        const cplx factor = std::pow(cplx(0.0, kTwoPi * xi), order);
        dhat[static_cast<std::size_t>(k)] = factor * fhat[static_cast<std::size_t>(k)];
        spectral += std::pow(std::abs(xi), 2.0 * order) * std::norm(fhat[static_cast<std::size_t>(k)]);
    }
    spectral = std::pow(kTwoPi, order) * std::sqrt(spectral);
    const double spatial = norm2(unitary_idft(dhat));
    const double scale = std::max(spectral, std::numeric_limits<double>::min());
    PlancherelCheck out;
    out.ratio = spatial / f_norm;
    out.rel_diff = std::abs(spatial - spectral) / scale;
    if (spectral == 0.0 && spatial == 0.0) out.rel_diff = 0.0;
    out.pass = out.rel_diff <= 1e-10;
    return out;
}

}  // namespace quniq
