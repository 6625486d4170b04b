#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "quniq/error.hpp"
#include "quniq/moments.hpp"
#include "quniq/verify.hpp"

using namespace quniq;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

Mask random_mask(std::mt19937_64& gen, std::int64_t N, double p) {
    std::bernoulli_distribution bit(p);
    Mask m(static_cast<std::size_t>(N));
    for (auto&& b : m) b = bit(gen);
    m[0] = true;
    return m;
}

Mask first_k(std::int64_t N, std::int64_t k) {
    Mask m(static_cast<std::size_t>(N), false);
    for (std::int64_t i = 0; i < k; ++i) m[static_cast<std::size_t>(i)] = true;
    return m;
}

std::vector<double> uniform_grid(double lo, double dxi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = lo + static_cast<double>(k) * dxi;
    return g;
}

}  // namespace

TEST_CASE("unitary DFT matches the defining sum") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> g;
    for (std::int64_t N : {1, 2, 7, 16, 27}) {
        std::vector<cplx> f(static_cast<std::size_t>(N));
        for (auto& v : f) v = {g(gen), g(gen)};
        const auto fhat = unitary_dft(f);
        for (std::int64_t k = 0; k < N; ++k) {
            cplx s = 0.0;
            for (std::int64_t j = 0; j < N; ++j) {
                s += f[static_cast<std::size_t>(j)] * std::polar(1.0, -kTwoPi * double(j * k) / double(N));
            }
            s /= std::sqrt(double(N));
            CHECK(std::abs(s - fhat[static_cast<std::size_t>(k)]) < 1e-12);
        }
        const auto back = unitary_idft(fhat);
        for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(back[j] - f[j]) < 1e-12);
    }
    CHECK(signed_frequency(3, 8) == 3);
    CHECK(signed_frequency(4, 8) == -4);
    CHECK(signed_frequency(7, 8) == -1);
}

TEST_CASE("masks") {
    const std::int64_t idx[] = {0, 3, 5};
    const auto m = mask_from_indices(8, idx);
    CHECK(mask_indices(m) == std::vector<std::int64_t>{0, 3, 5});
    const std::int64_t bad[] = {8};
    CHECK_THROWS_AS(mask_from_indices(8, bad), Error);
    const auto e = space_mask_from_set(8, IntervalSet({{0.0, 0.25}, {0.5, 0.55}}));
    CHECK(mask_indices(e) == std::vector<std::int64_t>{0, 1, 2, 4});
}

TEST_CASE("single-frequency observability is exact") {
    for (std::int64_t N : {16, 256, 1024}) {
        Mask q(static_cast<std::size_t>(N), false);
        q[5 % N] = true;
        for (std::int64_t m : {std::int64_t{1}, N / 3, N / 2, N}) {
            const auto r = observability_constant(N, q, first_k(N, m), SvdMethod::FullSvd);
            CHECK(r.sigma_min == doctest::Approx(std::sqrt(double(m) / double(N))).epsilon(1e-12));
            CHECK(r.q_count == 1);
            CHECK(r.e_count == m);
        }
    }
    const auto half = observability_constant(16, first_k(16, 1), first_k(16, 8), SvdMethod::FullSvd);
    CHECK(std::abs(half.sigma_min - 0.70710678118654752) < 1e-12);
    const auto all = observability_constant(64, first_k(64, 64), first_k(64, 64), SvdMethod::FullSvd);
    CHECK(all.sigma_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(all.recovery_constant == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-frequency Gram oracle") {
    // Dense Gram matrix of the restricted basis, closed-form 2x2 eigenvalue.
    const std::int64_t N = 8;
    const int q[] = {0, 1};
    std::complex<double> G[2][2] = {};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int j = 0; j < 4; ++j) {
                G[a][b] += std::polar(1.0, kTwoPi * double(j * (q[b] - q[a])) / double(N)) / double(N);
            }
        }
    }
    const double tr = (G[0][0] + G[1][1]).real();
    const double det = (G[0][0] * G[1][1] - G[0][1] * G[1][0]).real();
    const double lam = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
    const double closed = std::sqrt(0.5 - std::sqrt(4.0 + 2.0 * std::sqrt(2.0)) / 8.0);
    CHECK(std::sqrt(lam) == doctest::Approx(closed).epsilon(1e-14));

    for (auto method : {SvdMethod::FullSvd, SvdMethod::Iterative}) {
        const auto r = observability_constant(N, first_k(N, 2), first_k(N, 4), method, 3);
        CHECK(r.sigma_min == doctest::Approx(closed).epsilon(1e-10));
    }
    CHECK(closed == doctest::Approx(0.41637).epsilon(1e-5));
}

TEST_CASE("observability is monotone in the masks") {
    std::mt19937_64 gen(77);
    const std::int64_t N = 64;
    for (int trial = 0; trial < 20; ++trial) {
        const auto q_big = random_mask(gen, N, 0.3);
        auto q_small = q_big;
        for (std::size_t i = 1; i < q_small.size(); ++i) {
            if (q_small[i] && gen() % 2) q_small[i] = false;
        }
        const auto e_big = random_mask(gen, N, 0.7);
        auto e_small = e_big;
        for (std::size_t i = 1; i < e_small.size(); ++i) {
            if (e_small[i] && gen() % 3 == 0) e_small[i] = false;
        }
        const double base = observability_constant(N, q_small, e_big, SvdMethod::FullSvd).sigma_min;
        CHECK(observability_constant(N, q_big, e_big, SvdMethod::FullSvd).sigma_min <= base + 1e-12);
        CHECK(observability_constant(N, q_small, e_small, SvdMethod::FullSvd).sigma_min <= base + 1e-12);
    }
}

TEST_CASE("iterative and full methods agree") {
    std::mt19937_64 gen(512);
    for (int trial = 0; trial < 4; ++trial) {
        const auto q = random_mask(gen, 512, 0.2);
        const auto e = random_mask(gen, 512, 0.6);
        const auto full = observability_constant(512, q, e, SvdMethod::FullSvd);
        const auto iter = observability_constant(512, q, e, SvdMethod::Iterative, 9);
        CHECK(iter.certified);
        CHECK(std::abs(full.sigma_min - iter.sigma_min) <= 1e-8 * full.sigma_min);
    }
}

TEST_CASE("singular and invalid experiments") {
    // more frequencies than points: sigma_min = 0, reported rather than thrown
    const auto r = observability_constant(16, first_k(16, 5), first_k(16, 3), SvdMethod::FullSvd);
    CHECK(r.singular);
    CHECK(r.sigma_min == 0.0);
    CHECK(std::isinf(r.recovery_constant));
    CHECK_THROWS_AS(observability_constant(16, Mask(16, false), first_k(16, 3), SvdMethod::FullSvd), Error);
    CHECK_THROWS_AS(observability_constant(16, first_k(8, 1), first_k(16, 3), SvdMethod::FullSvd), Error);
    CHECK_THROWS_AS(observability_constant(kFullSvdLimit * 2, first_k(kFullSvdLimit * 2, 1),
                                           first_k(kFullSvdLimit * 2, 1), SvdMethod::FullSvd),
                    Error);
}

TEST_CASE("synthetic signals") {
    SpectralProfile one;
    one.freq_mask = first_k(32, 0);
    one.freq_mask[3] = true;
    const auto s = synth_from_profile(one, 32, 5);
    const double mod = std::abs(s.samples[0]);
    for (const auto& v : s.samples) CHECK(std::abs(v) == doctest::Approx(mod).epsilon(1e-12));

    // deterministic per seed
    const auto again = synth_from_profile(one, 32, 5);
    CHECK(again.samples == s.samples);

    SpectralProfile band;
    band.mode = ProfileMode::Decay;
    band.weight = Weight::band_limit(16.0);
    band.c_w = 1.5;
    const auto b = synth_from_profile(band, 64, 2);
    for (std::int64_t k = 0; k < 64; ++k) {
        if (std::abs(signed_frequency(k, 64)) > 16) CHECK(std::abs(b.coefficients[k]) < 1e-14);
    }

    SpectralProfile decay;
    decay.mode = ProfileMode::Decay;
    decay.weight = Weight::end_point(1.0, 1.0);
    decay.c_w = 2.0;
    const auto d = synth_from_profile(decay, 128, 8);
    double weighted = 0.0, plain = 0.0;
    for (std::int64_t k = 0; k < 128; ++k) {
        const double a = std::norm(d.coefficients[k]);
        const double lw = decay.weight->log_value(std::abs(double(signed_frequency(k, 128))));
        weighted += a * std::exp(2.0 * lw);
        plain += a;
    }
    CHECK(weighted / plain <= 4.0 * (1.0 + 1e-9));
    CHECK(weighted / plain >= 0.99 * 4.0);
    CHECK(weighted / plain == doctest::Approx(d.ratio).epsilon(1e-9));
}

TEST_CASE("recovery ratio") {
    std::vector<cplx> f(16, cplx{1.0, 1.0});
    CHECK(recovery_ratio(f, Mask(16, true)) == doctest::Approx(1.0));
    CHECK(recovery_ratio(f, first_k(16, 4)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(recovery_ratio(std::vector<cplx>(16), first_k(16, 4)), Error);

    // single functions never beat the certified constant
    std::mt19937_64 gen(4);
    const std::int64_t N = 32;
    const auto q = random_mask(gen, N, 0.25);
    const auto e = random_mask(gen, N, 0.6);
    const double sigma = observability_constant(N, q, e, SvdMethod::FullSvd).sigma_min;
    SpectralProfile p;
    p.freq_mask = q;
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        worst = std::min(worst, recovery_ratio(synth_from_profile(p, N, seed).samples, e));
    }
    CHECK(worst >= sigma - 1e-12);
}

TEST_CASE("Paley-Wiener profile") {
    const auto m = MomentSequence::from_weight(Weight::power_exp(1.0, 0.5), 200);
    const int n0 = paley_wiener_n0(m, 0.1);
    CHECK(n0 >= 10);
    const auto grid = uniform_grid(-200.0, 0.5, 801);
    const auto p = paley_wiener_profile(m, 0.1, std::nullopt, grid);
    CHECK(p.n0 == n0);
    CHECK(p.tail_sum < 0.1);
    CHECK(p.support_halfwidth == doctest::Approx((0.2 + p.tail_sum) / kTwoPi).epsilon(1e-14));
    CHECK(p.values[400] == doctest::Approx(std::exp(m.log_m(n0 - 1))).epsilon(1e-14));
    for (std::size_t k = 0; k < 400; ++k) CHECK(p.values[k] == doctest::Approx(p.values[800 - k]).epsilon(1e-12));
    for (double v : p.values) CHECK(std::abs(v) <= p.values[400] * (1.0 + 1e-14));

    CHECK_THROWS_AS(paley_wiener_profile(m, 1e-6, std::nullopt, grid), Error);
    CHECK_THROWS_AS(paley_wiener_profile(m, 0.02, 10, grid), Error);  // tail from 10 is about 0.027
}

TEST_CASE("centered inverse transform") {
    // Gaussian pair: fhat = exp(-pi xi^2) <-> f = exp(-pi x^2)
    const std::size_t n = 1024;
    const double dxi = 1.0 / 32.0;
    std::vector<double> fhat(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = (double(k) - double(n / 2)) * dxi;
        fhat[k] = std::exp(-std::numbers::pi * xi * xi);
    }
    const auto s = centered_inverse_transform(fhat, dxi);
    for (std::size_t j = 0; j < n; j += 37) {
        CHECK(std::abs(s.f[j] - std::exp(-std::numbers::pi * s.x[j] * s.x[j])) < 1e-12);
    }
    CHECK(s.x[n / 2] == 0.0);
    CHECK(s.x[n / 2 + 1] == doctest::Approx(1.0 / (double(n) * dxi)));
}

TEST_CASE("weighted energy") {
    // inside a band the weight is 1: plain trapezoid energy
    const auto grid = uniform_grid(-1.0, 0.25, 9);
    std::vector<double> ones(9, 1.0);
    CHECK(std::exp(weighted_energy(ones, Weight::band_limit(2.0), grid).log_value) == doctest::Approx(2.0));

    const auto m = MomentSequence::from_weight(Weight::power_exp(1.0, 0.5), 200);
    const auto w = Weight::power_exp(1.0, 0.5);
    const auto coarse = uniform_grid(-2000.0, 0.5, 8001);
    const auto fine = uniform_grid(-2000.0, 0.25, 16001);
    const auto pc = paley_wiener_profile(m, 0.1, std::nullopt, coarse);
    const auto pf = paley_wiener_profile(m, 0.1, std::nullopt, fine);
    const auto ec = weighted_energy(pc, w, coarse);
    const auto ef = weighted_energy(pf, w, fine);
    CHECK(std::isfinite(ec.log_value));
    CHECK(std::abs(std::expm1(ec.log_value - ef.log_value)) < 0.01);
    CHECK(ec.log_tail_bound < ec.log_value);

    // against an end-point weight the energy keeps growing with the range
    const auto e = Weight::end_point(1.0, 1.0);
    double prev = -1e300;
    for (double range : {500.0, 1000.0, 2000.0, 4000.0}) {
        const auto g = uniform_grid(-range, 0.5, static_cast<std::size_t>(4.0 * range) + 1);
        const auto p = paley_wiener_profile(m, 0.1, std::nullopt, g);
        const double v = weighted_energy(p.values, e, g).log_value;
        CHECK(v > prev + 1.0);
        prev = v;
    }
}

TEST_CASE("Plancherel derivative check") {
    const std::int64_t N = 64;
    std::vector<cplx> wave(N);
    for (std::int64_t j = 0; j < N; ++j) wave[j] = std::polar(1.0, kTwoPi * 5.0 * double(j) / double(N));
    const auto d1 = plancherel_derivative_check(wave, 1);
    CHECK(d1.pass);
    CHECK(d1.ratio == doctest::Approx(kTwoPi * 5.0).epsilon(1e-12));
    const auto d0 = plancherel_derivative_check(wave, 0);
    CHECK(d0.pass);
    CHECK(d0.ratio == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 gen(6);
    SpectralProfile p;
    p.freq_mask = Mask(256, false);
    for (std::int64_t k = 0; k < 256; ++k) p.freq_mask[k] = std::abs(signed_frequency(k, 256)) <= 40;
    for (int order = 0; order <= 4; ++order) {
        const auto r = plancherel_derivative_check(synth_from_profile(p, 256, gen()).samples, order);
        CHECK(r.pass);
        CHECK(r.rel_diff <= 1e-10);
    }
    CHECK_THROWS_AS(plancherel_derivative_check(std::vector<cplx>(8), 1), Error);
}
