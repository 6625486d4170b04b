#pragma once

#include <vector>

#include "quniq/log_scale.hpp"
#include "quniq/moments.hpp"

namespace quniq {

/// Uniform Bang degree query: the sequence and lambda = -log t, t in (0, 1].
struct BangQuery {
    const MomentSequence& m;
    double neg_log_t;
};

/// Largest N <= n_max with sum_{lambda < n <= N} mu_n < e (strict).
/// Throws ExceedsNmax when the partial sums never reach e within n_max.
int bang_degree(const BangQuery& q);

/// gamma_M(n) = max_{1 <= j <= n} j (M_{j+1} M_{j-1} / M_j^2 - 1). Needs n + 1 <= n_max.
double gamma_coeff(const MomentSequence& m, int n);

/// log Gamma_M(n) = log 4 + 4 + 4 gamma_M(n).
LogScale big_gamma(const MomentSequence& m, int n);

/// log of (Gamma / s)^{2n}, the one-dimensional Remez bound for a given Bang degree.
LogScale theta_from_degree(int degree, LogScale log_big_gamma, double s);

/// Certified Remez constants together with the per-level bookkeeping.
struct ThetaResult {
    LogScale log_theta;
    std::vector<int> bang_degrees;  // one per recursion level
    std::vector<double> lambdas;    // -log t at each level
    std::vector<double> s_values;   // measure parameter at each level
};

/// One-dimensional bound log Theta_M(1, t, s) <= 2n (log Gamma_M(2n) - log s),
/// n the Bang degree at lambda = -log t.
ThetaResult theta_1d(const MomentSequence& m, double neg_log_t, double s);

/// Theta_M(d, t, s) <= Theta_M(1, t, s/2) Theta_M(d-1, t / Theta_M(1, t, s/2), s/2),
/// carried out in log space. ExceedsNmax errors carry the failing level.
ThetaResult theta_nd(const MomentSequence& m, int d, double neg_log_t, double s);

/// A = max(e, 2 C_Sob(d)) with C_Sob(d) = 2^d, the constant obtained by iterating
/// sup|g| <= ||g||_{L1} + ||g'||_{L1} on a unit interval once per coordinate.
double sobolev_constant(int d);
double default_shift_base(int d);

/// M~_n = A^n M_{n+d} / M_d (and M~_0 = 1) for n = 0..n_max - d.
MomentSequence shifted_sequence(const MomentSequence& m, int d, double A);

struct PlsConstant {
    LogScale log_c;       // C^2 = (4/gamma) Theta^2, unit side length
    ThetaResult theta;    // Theta_{M~}(d, 1/(C_W A^{1+d} M_d), gamma/2)
    double A;
    double lambda;        // log C_W + (1+d) log A + log M_d
    int n_max;
};

/// Recovery constant for weights with the PLS property. Throws InvalidWeight
/// unless pls_classify(w) is Holds; ExceedsNmax when n_max is too small.
PlsConstant pls_constant(const Weight& w, int d, double c_w, double gamma, double A, int n_max);

}  // namespace quniq
