#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quniq/intervals.hpp"
#include "quniq/moments.hpp"
#include "quniq/weights.hpp"

namespace quniq {

using cplx = std::complex<double>;
using Mask = std::vector<bool>;

/// Unitary DFT on the circle model: fhat_k = N^{-1/2} sum_j f_j e^{-2 pi i jk/N}.
std::vector<cplx> unitary_dft(std::span<const cplx> f);
std::vector<cplx> unitary_idft(std::span<const cplx> fhat);
/// Index k in 0..N-1 read as the frequency in [-N/2, N/2).
inline std::int64_t signed_frequency(std::int64_t k, std::int64_t N) { return 2 * k < N ? k : k - N; }

Mask mask_from_indices(std::int64_t N, std::span<const std::int64_t> indices);
std::vector<std::int64_t> mask_indices(const Mask& m);
/// Grid points j with j/N in the set, for a set living in one period [0, 1).
Mask space_mask_from_set(std::int64_t N, const IntervalSet& e);

enum class SvdMethod { FullSvd, Iterative };
const char* to_string(SvdMethod m);

struct DiscreteExperiment {
    std::int64_t N = 0;
    std::int64_t q_count = 0;
    std::int64_t e_count = 0;
    double sigma_min = 0.0;
    double recovery_constant = 0.0;  // 1 / sigma_min, +inf when singular
    SvdMethod method = SvdMethod::FullSvd;
    std::uint64_t seed = 0;
    bool singular = false;    // sigma_min < 1e-14
    double residual = 0.0;    // ||A^H A v - sigma^2 v|| (iterative only)
    bool certified = true;    // residual within 1e-9 sigma^2 (iterative only)
    double wall_time_ms = 0.0;
};

inline constexpr std::int64_t kFullSvdLimit = 8192;
inline constexpr double kSingularThreshold = 1e-14;

/// Smallest singular value of (restrict to E) o (unitary inverse DFT) o (embed Q).
/// Masks have length N; Q indexes frequencies 0..N-1, E indexes points j/N.
DiscreteExperiment observability_constant(std::int64_t N, const Mask& freq_mask, const Mask& space_mask,
                                          SvdMethod method, std::uint64_t seed = 0);

enum class ProfileMode { Mask, Decay };

struct SpectralProfile {
    ProfileMode mode = ProfileMode::Mask;
    Mask freq_mask;                // Mask mode
    std::optional<Weight> weight;  // Decay mode
    double c_w = 1.0;              // Decay mode
};

struct SynthResult {
    std::vector<cplx> samples;
    std::vector<cplx> coefficients;  // unitary DFT of the samples
    double ratio = 1.0;              // sum |c W|^2 / sum |c|^2 (Decay mode)
    double beta = 0.0;               // c ~ g / W^beta (Decay mode)
};

/// Mask mode: standard complex Gaussian coefficients on the mask. Decay mode:
/// Gaussian coefficients damped by W(|xi|)^{-beta}, beta chosen by bisection so
/// the ratio sits at 0.995 C_W^2, unit l2 norm. Deterministic per seed.
SynthResult synth_from_profile(const SpectralProfile& p, std::int64_t N, std::uint64_t seed);

/// ||f chi_E|| / ||f||. Throws ZeroFunction on a zero input.
double recovery_ratio(std::span<const cplx> samples, const Mask& space_mask);

struct PaleyWienerProfile {
    std::vector<double> values;   // fhat on the grid
    int n0 = 0;
    int n_max = 0;
    double epsilon = 0.0;
    double log_m0 = 0.0;          // log M_{n0-1}
    double tail_sum = 0.0;        // sum_{n0 <= n <= n_max} mu_n
    double support_halfwidth = 0.0;  // (2 eps + tail_sum) / (2 pi) in x
};

/// fhat(xi) = M_{n0-1} sinc(eps xi / n0)^{2 n0} prod_{n0 <= n <= n_max} sinc(mu_n xi),
/// sinc(x) = sin x / x. Without n0, the smallest n0 >= 10 whose tail sum is
/// below eps is used. Throws TailTooFat when the tail sum reaches eps.
PaleyWienerProfile paley_wiener_profile(const MomentSequence& m, double epsilon, std::optional<int> n0,
                                        std::span<const double> xi_grid);

/// Smallest n0 >= 10 with sum_{n0 <= n <= n_max} mu_n < eps; TailTooFat if none.
int paley_wiener_n0(const MomentSequence& m, double epsilon);

struct CenteredSamples {
    std::vector<double> x;
    std::vector<cplx> f;
};

/// f(x) = int fhat(xi) e^{2 pi i x xi} dxi from samples at xi_k = (k - N/2) dxi,
/// returned at x_j = (j - N/2) / (N dxi) (period 1/dxi).
CenteredSamples centered_inverse_transform(std::span<const double> fhat, double dxi);

struct WeightedEnergy {
    double log_value;       // log of the trapezoid sum of |fhat|^2 W^2 over the grid
    double log_tail_bound;  // log of the analytic tail bound beyond the grid (+inf if unavailable)
};

/// log of int |fhat|^2 W(|xi|)^2 dxi by the trapezoid rule on a uniform grid,
/// in log space. The tail bound is filled by the Paley-Wiener overload.
WeightedEnergy weighted_energy(std::span<const double> f_hat, const Weight& w, std::span<const double> xi_grid);

/// Same, plus a bound on the tail beyond the grid, valid while the supporting
/// slope of log W (in log t) past the grid end lies in [n0, n_max + 1).
WeightedEnergy weighted_energy(const PaleyWienerProfile& p, const Weight& w, std::span<const double> xi_grid);

struct PlancherelCheck {
    bool pass;
    double ratio;     // ||D^n f|| / ||f||
    double rel_diff;  // between the spatial and spectral evaluations of ||D^n f||
};

/// Compares ||D^n f|| from spectral differentiation (period 1, signed
/// frequencies) against (2 pi)^n ||xi^n fhat||; passes at 1e-10.
PlancherelCheck plancherel_derivative_check(std::span<const cplx> samples, int order);

}  // namespace quniq
