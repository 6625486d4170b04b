#include "quniq/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "quniq/covers.hpp"
#include "quniq/error.hpp"
#include "quniq/intervals.hpp"
#include "quniq/moments.hpp"
#include "quniq/quasianalytic.hpp"
#include "quniq/verify.hpp"
#include "quniq/weights.hpp"

namespace quniq {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string weight;
    std::string weight_file;
    int nmax = -1;
    int d = 1;
    double gamma = 0.5;
    double cw = 1.0;
    double A = 0.0;  // 0: default shift base
    std::int64_t N = 65536;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    std::string intervals;
    double t = 0.0;
    int n_lo = 0;
    int n_hi = 20;
    double grid_lo = 0.0;
    double grid_hi = 0.0;
    int grid_count = 1;
    int base = 3;
    std::string digits = "0,2";
    int k_min = 3;
    int k_max = 6;
    std::string placement = "left";
    std::string method = "full";
    int jobs = 1;
    bool require_positive = false;
    bool timing = false;
    double epsilon = 0.1;
    int n0 = 0;  // 0: automatic
    double dxi = 0.5;
};

// JSON has no infinities; they are written as strings.
json num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::string fmt17(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

int nmax_or(const Options& o, int fallback) { return o.nmax > 0 ? o.nmax : fallback; }

Weight require_weight(const Options& o, const char* fallback = nullptr) {
    if (!o.weight.empty() && !o.weight_file.empty()) {
        throw Error(ErrorCode::InvalidArgument, "give --weight or --weight-file, not both");
    }
    if (!o.weight_file.empty()) {
        std::ifstream in(o.weight_file);
        if (!in) throw Error(ErrorCode::ParseError, "cannot open " + o.weight_file);
        std::stringstream text;
        text << in.rdbuf();
        return from_record(text.str()).weight;
    }
    if (o.weight.empty()) {
        if (fallback) return parse_weight_spec(fallback);
        throw Error(ErrorCode::InvalidArgument, "--weight or --weight-file is required");
    }
    return parse_weight_spec(o.weight);
}

IntervalSet read_intervals(const Options& o) {
    if (o.intervals.empty()) throw Error(ErrorCode::InvalidArgument, "--intervals FILE is required");
    std::ifstream in(o.intervals);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + o.intervals);
    return IntervalSet::parse(in);
}

std::string weight_report(const Options& o) {
    const Weight w = require_weight(o);
    const int n_max = nmax_or(o, 20);
    const auto m = MomentSequence::from_weight(w, n_max);
    const auto cauchy = log_integral_detailed(w, IntegralForm::Cauchy);
    const auto power = log_integral_detailed(w, IntegralForm::Power);
    const auto mu = m.mu_values();
    double sum_mu = 0.0;
    for (double v : mu) sum_mu += v;
    const PlsClass cls = pls_classify(w);

    json r;
    r["family"] = w.family_name();
    r["weight"] = weight_spec(w);
    r["n_max"] = n_max;
    r["log_M"] = num_array(m.log_moments());
    r["mu"] = num_array(mu);
    r["log_integral"] = {{"cauchy", num(cauchy.value)},
                         {"cauchy_quad_error", num(cauchy.quad_error)},
                         {"power", num(power.value)},
                         {"power_quad_error", num(power.quad_error)}};
    // sum mu <= int_1^inf log W / t^2 <= sum mu + 1
    r["sandwich"] = {{"sum_mu", num(sum_mu)},
                     {"lower_residual", num(power.value - sum_mu)},
                     {"upper_residual", num(sum_mu + 1.0 - power.value)}};
    r["pls_classification"] = to_string(cls);
    return r.dump(2) + "\n";
}

std::string pls_constant_report(const Options& o) {
    const Weight w = require_weight(o);
    const double A = o.A > 0.0 ? o.A : default_shift_base(o.d);
    const int n_max = nmax_or(o, 400);
    const auto c = pls_constant(w, o.d, o.cw, o.gamma, A, n_max);
    json r;
    r["weight"] = weight_spec(w);
    r["d"] = o.d;
    r["gamma"] = o.gamma;
    r["C_W"] = o.cw;
    r["A"] = c.A;
    r["n_max"] = c.n_max;
    r["lambda"] = num(c.lambda);
    r["log_C"] = num(c.log_c.value);
    r["log_C_nested"] = c.log_c.nested;
    r["log_theta"] = num(c.theta.log_theta.value);
    r["log_theta_nested"] = c.theta.log_theta.nested;
    json levels = json::array();
    for (std::size_t i = 0; i < c.theta.bang_degrees.size(); ++i) {
        levels.push_back({{"level", i + 1},
                          {"bang_degree", c.theta.bang_degrees[i]},
                          {"lambda", num(c.theta.lambdas[i])},
                          {"s", num(c.theta.s_values[i])}});
    }
    r["levels"] = levels;
    return r.dump(2) + "\n";
}

json cover_json(const CoverFamily& c) {
    json scales = json::array();
    for (const auto& s : c.scales) {
        json iv = json::array();
        for (const auto& j : s.intervals) iv.push_back({j.lo, j.hi});
        scales.push_back({{"n", s.n}, {"omega", s.omega}, {"card", s.intervals.size()}, {"intervals", iv}});
    }
    return {{"norm", c.norm()}, {"card", c.card()}, {"scales", scales}};
}

std::string cover_report(const Options& o, bool csv) {
    const Weight w = require_weight(o);
    const IntervalSet q = read_intervals(o);
    const auto cover = greedy_short_cover(q, w, o.t, o.n_lo, o.n_hi);
    const auto reg = regularize_cover(cover, q);
    const double grid_t[] = {o.t};
    const auto sparsity = sparsity_norm_estimate(q, w, grid_t, o.n_lo, o.n_hi);

    bool within_seven = true;
    for (const auto& s : reg.scales) {
        const auto* in = cover.scale(s.n);
        const std::size_t in_card = in ? in->intervals.size() : 0;
        if (s.intervals.size() > 7 * in_card) within_seven = false;
    }

    if (csv) {
        std::ostringstream os;
        os << "t,n,omega,card,regularized_card,norm_contribution\n";
        for (const auto& s : cover.scales) {
            const auto* rs = reg.scale(s.n);
            const double r = s.omega / std::exp(static_cast<double>(s.n));
            os << fmt17(o.t) << ',' << s.n << ',' << fmt17(s.omega) << ',' << s.intervals.size() << ','
               << (rs ? rs->intervals.size() : 0) << ',' << fmt17(r * r * static_cast<double>(s.intervals.size()))
               << '\n';
        }
        os << fmt17(o.t) << ",total,," << cover.card() << ',' << reg.card() << ',' << fmt17(cover.norm()) << '\n';
        return os.str();
    }

    json r;
    r["weight"] = weight_spec(w);
    r["t"] = o.t;
    r["n_range"] = {o.n_lo, o.n_hi};
    r["cover"] = cover_json(cover);
    json rj = cover_json(reg);
    rj["halves_disjoint"] = reg.halves_disjoint();
    rj["card_within_7x"] = within_seven;
    r["regularized"] = rj;
    r["sparsity"] = {{"value", sparsity.value},
                     {"argmax_t", sparsity.argmax_t},
                     {"samples", sparsity.samples},
                     {"status", "LOWER_BOUND"}};
    return r.dump(2) + "\n";
}

std::string sparsity_report(const Options& o) {
    const Weight w = require_weight(o);
    const IntervalSet q = read_intervals(o);
    if (o.grid_count < 1) throw Error(ErrorCode::InvalidArgument, "--grid-count must be >= 1");
    if (o.grid_hi < o.grid_lo) throw Error(ErrorCode::InvalidArgument, "--grid-hi must be >= --grid-lo");
    std::vector<double> grid;
    for (int i = 0; i < o.grid_count; ++i) {
        const double f = o.grid_count == 1 ? 0.0 : static_cast<double>(i) / (o.grid_count - 1);
        grid.push_back(o.grid_lo + f * (o.grid_hi - o.grid_lo));
    }
    const auto s = sparsity_norm_estimate(q, w, grid, o.n_lo, o.n_hi);
    json r;
    r["weight"] = weight_spec(w);
    r["n_range"] = {o.n_lo, o.n_hi};
    r["value"] = s.value;
    r["argmax_t"] = s.argmax_t;
    r["samples"] = s.samples;
    r["status"] = "LOWER_BOUND";
    return r.dump(2) + "\n";
}

std::vector<int> parse_digits(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad digit '" + item + "'");
        }
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "empty digit list");
    return out;
}

std::pair<std::string, bool> fup_experiment(const Options& o, bool csv) {
    if (o.k_min < 0 || o.k_max < o.k_min) throw Error(ErrorCode::InvalidArgument, "need 0 <= k-min <= k-max");
    if (o.jobs < 1) throw Error(ErrorCode::InvalidArgument, "--jobs must be >= 1");
    const auto digits = parse_digits(o.digits);
    Placement placement;
    if (o.placement == "left") placement = Placement::Left;
    else if (o.placement == "random") placement = Placement::Random;
    else throw Error(ErrorCode::InvalidArgument, "--placement must be left or random");
    SvdMethod method;
    if (o.method == "full") method = SvdMethod::FullSvd;
    else if (o.method == "iterative") method = SvdMethod::Iterative;
    else throw Error(ErrorCode::InvalidArgument, "--method must be full or iterative");

    const auto family = gamma_dense_intervals(o.gamma, 0, 0, placement, o.seed);
    const IntervalSet e = family.union_set();
    const int count = o.k_max - o.k_min + 1;
    std::vector<DiscreteExperiment> results(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));

    auto run = [&](int i) {
        const int k = o.k_min + i;
        const auto idx = cantor_indices(o.base, digits, k);
        const auto N = static_cast<std::int64_t>(std::llround(std::pow(o.base, k)));
        results[static_cast<std::size_t>(i)] =
            observability_constant(N, mask_from_indices(N, idx), space_mask_from_set(N, e), method, o.seed);
    };
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                run(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const int threads = std::min(o.jobs, count);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    for (const auto& ep : errors) {
        if (ep) std::rethrow_exception(ep);
    }

    bool any_singular = false;
    for (const auto& r : results) any_singular = any_singular || r.singular;

    if (csv) {
        std::ostringstream os;
        os << "N,Q_size,E_size,sigma_min,recovery_constant,method,seed,wall_time_ms\n";
        for (const auto& r : results) {
            os << r.N << ',' << r.q_count << ',' << r.e_count << ',' << fmt17(r.sigma_min) << ','
               << fmt17(r.recovery_constant) << ',' << to_string(r.method) << ',' << r.seed << ','
               << (o.timing ? fmt17(r.wall_time_ms) : "") << '\n';
        }
        return {os.str(), any_singular};
    }
    json rows = json::array();
    for (const auto& r : results) {
        json row = {{"N", r.N},
                    {"Q_size", r.q_count},
                    {"E_size", r.e_count},
                    {"sigma_min", r.sigma_min},
                    {"recovery_constant", num(r.recovery_constant)},
                    {"method", to_string(r.method)},
                    {"seed", r.seed},
                    {"singular", r.singular}};
        row["wall_time_ms"] = o.timing ? json(r.wall_time_ms) : json(nullptr);
        rows.push_back(row);
    }
    return {rows.dump(2) + "\n", any_singular};
}

std::string paley_wiener_report(const Options& o) {
    const Weight w = require_weight(o, "powerexp:1,0.5");
    const int n_max = nmax_or(o, 200);
    if (o.N < 4 || o.N % 2 != 0) throw Error(ErrorCode::InvalidArgument, "--N must be even and >= 4");
    if (!(o.dxi > 0.0)) throw Error(ErrorCode::InvalidArgument, "--dxi must be positive");
    const auto m = MomentSequence::from_weight(w, n_max);
    std::vector<double> grid(static_cast<std::size_t>(o.N));
    for (std::int64_t k = 0; k < o.N; ++k) grid[static_cast<std::size_t>(k)] = static_cast<double>(k - o.N / 2) * o.dxi;
    const auto p = paley_wiener_profile(m, o.epsilon, o.n0 > 0 ? std::optional<int>(o.n0) : std::nullopt, grid);
    const auto f = centered_inverse_transform(p.values, o.dxi);
    const double window = 3.0 * o.epsilon;
    Mask outside(f.x.size());
    for (std::size_t j = 0; j < f.x.size(); ++j) outside[j] = std::abs(f.x[j]) > window;
    double total = 0.0, out_energy = 0.0;
    for (std::size_t j = 0; j < f.f.size(); ++j) {
        total += std::norm(f.f[j]);
        if (outside[j]) out_energy += std::norm(f.f[j]);
    }
    const auto energy = weighted_energy(p, w, grid);

    json r;
    r["weight"] = weight_spec(w);
    r["n_max"] = n_max;
    r["epsilon"] = o.epsilon;
    r["n0"] = p.n0;
    r["tail_sum"] = p.tail_sum;
    r["log_M_n0_minus_1"] = p.log_m0;
    r["support_halfwidth"] = p.support_halfwidth;
    r["grid"] = {{"N", o.N}, {"dxi", o.dxi}, {"period", 1.0 / o.dxi}};
    r["energy_fraction_outside"] = total > 0.0 ? out_energy / total : 0.0;
    r["recovery_ratio_outside"] = recovery_ratio(f.f, outside);
    r["log_weighted_energy"] = num(energy.log_value);
    r["log_tail_bound"] = num(energy.log_tail_bound);
    return r.dump(2) + "\n";
}

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::Divergent:
        case ErrorCode::Undecidable:
        case ErrorCode::InvalidWeight:
        case ErrorCode::NotLogConvex:
            return kExitWeight;
        case ErrorCode::ExceedsNmax:
            return kExitNmax;
        default:
            return kExitInvalid;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantitative uncertainty principle toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value file; flags override it");
    Options o;
    app.add_option("--weight", o.weight, "FAMILY:params, e.g. band:2, powerexp:1,0.5, endpoint:1,1");
    app.add_option("--weight-file", o.weight_file, "weight record file (family=..., parameters, n_max)");
    app.add_option("--nmax", o.nmax, "largest moment index");
    app.add_option("--d", o.d, "dimension")->check(CLI::PositiveNumber);
    app.add_option("--gamma", o.gamma, "density parameter in (0, 1)");
    app.add_option("--cw", o.cw, "decay constant C_W >= 1");
    app.add_option("--A", o.A, "shift base (default max(e, 2^{d+1}))");
    app.add_option("--N", o.N, "grid size");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--out", o.out, "write the report here instead of stdout");
    app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--intervals", o.intervals, "interval file, one 'a b' per line");
    app.add_option("--t", o.t, "translate for the cover");
    app.add_option("--n-lo", o.n_lo, "first scale");
    app.add_option("--n-hi", o.n_hi, "last scale");
    app.add_option("--grid-lo", o.grid_lo, "first sampled translate");
    app.add_option("--grid-hi", o.grid_hi, "last sampled translate");
    app.add_option("--grid-count", o.grid_count, "number of grid translates");
    app.add_option("--base", o.base, "Cantor base");
    app.add_option("--digits", o.digits, "Cantor digits, comma separated");
    app.add_option("--k-min", o.k_min, "first Cantor depth");
    app.add_option("--k-max", o.k_max, "last Cantor depth");
    app.add_option("--placement", o.placement, "left or random");
    app.add_option("--method", o.method, "full or iterative");
    app.add_option("--jobs", o.jobs, "worker threads");
    app.add_flag("--require-positive", o.require_positive, "exit 5 on singular experiments");
    app.add_flag("--timing", o.timing, "fill wall_time_ms (breaks byte-identical reruns)");
    app.add_option("--epsilon", o.epsilon, "support parameter");
    app.add_option("--n0", o.n0, "first index of the sinc product (default automatic)");
    app.add_option("--dxi", o.dxi, "frequency spacing");

    const char* names[] = {"weight-report", "pls-constant", "cover", "sparsity", "fup-experiment", "paley-wiener"};
    const char* help[] = {"moments, log integrals and PLS class of a weight",
                          "recovery constant for a weight with the PLS property",
                          "W-short cover, regularization and sparsity of an interval file",
                          "sampled sparsity norm over a grid of translates",
                          "observability constants for Cantor spectra and gamma-dense sets",
                          "compactly supported function whose transform decays like 1/W"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    const bool csv = o.format == "csv" || (o.format.empty() && cmd == "fup-experiment");
    std::string report;
    int code = kExitOk;
    try {
        if (cmd == "weight-report") report = weight_report(o);
        else if (cmd == "pls-constant") report = pls_constant_report(o);
        else if (cmd == "cover") report = cover_report(o, csv);
        else if (cmd == "sparsity") report = sparsity_report(o);
        else if (cmd == "paley-wiener") report = paley_wiener_report(o);
        else {
            auto [text, singular] = fup_experiment(o, csv);
            report = std::move(text);
            if (singular && o.require_positive) code = kExitSingular;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.code() == ErrorCode::ExceedsNmax && e.level() > 0) {
            err << "failing recursion level: " << e.level() << '\n';
        }
        return exit_code(e.code());
    }

    if (o.out.empty()) {
        out << report;
    } else {
        std::ofstream file(o.out, std::ios::binary);
        if (!file) {
            err << "error: cannot write " << o.out << '\n';
            return kExitInvalid;
        }
        file << report;
    }
    if (code == kExitSingular) err << "error: singular experiment (sigma_min < 1e-14)\n";
    return code;
}

}  // namespace quniq
