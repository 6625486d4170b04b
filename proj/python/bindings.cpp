#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quniq/cli.hpp"
#include "quniq/covers.hpp"
#include "quniq/error.hpp"
#include "quniq/intervals.hpp"
#include "quniq/moments.hpp"
#include "quniq/quasianalytic.hpp"
#include "quniq/verify.hpp"
#include "quniq/weights.hpp"

namespace py = pybind11;
using namespace quniq;

namespace {

py::dict theta_dict(const ThetaResult& t) {
    py::dict d;
    d["log_theta"] = t.log_theta.value;
    d["nested"] = t.log_theta.nested;
    d["bang_degrees"] = t.bang_degrees;
    d["lambdas"] = t.lambdas;
    d["s_values"] = t.s_values;
    return d;
}

IntegralForm parse_form(const std::string& s) {
    if (s == "cauchy") return IntegralForm::Cauchy;
    if (s == "power") return IntegralForm::Power;
    throw Error(ErrorCode::InvalidArgument, "form must be 'cauchy' or 'power'");
}

SvdMethod parse_method(const std::string& s) {
    if (s == "full") return SvdMethod::FullSvd;
    if (s == "iterative") return SvdMethod::Iterative;
    throw Error(ErrorCode::InvalidArgument, "method must be 'full' or 'iterative'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core routines of the quniq toolkit";

    static py::object error_type = py::reinterpret_borrow<py::object>(
        py::handle(PyErr_NewException("quniq.QuniqError", PyExc_RuntimeError, nullptr)));
    m.attr("QuniqError") = error_type;
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object instance = error_type(e.what());
            instance.attr("code") = to_string(e.code());
            instance.attr("level") = e.level();
            PyErr_SetObject(error_type.ptr(), instance.ptr());
        }
    });

    py::class_<Weight>(m, "Weight")
        .def_static("band_limit", &Weight::band_limit, py::arg("band"))
        .def_static("power_exp", &Weight::power_exp, py::arg("c"), py::arg("alpha"))
        .def_static("end_point", &Weight::end_point, py::arg("delta"), py::arg("c"))
        .def_static("tabulated", &Weight::tabulated, py::arg("knots"), py::arg("slope") = std::nullopt)
        .def_property_readonly("family", &Weight::family_name)
        .def("log_value", &Weight::log_value, py::arg("t"))
        .def("finiteness_radius", &Weight::finiteness_radius)
        .def("__repr__", [](const Weight& w) { return "Weight('" + weight_spec(w) + "')"; });
    m.def("parse_weight_spec", &parse_weight_spec, py::arg("spec"));

    py::class_<MomentSequence>(m, "MomentSequence")
        .def_static("from_mu", [](const std::vector<double>& mu) { return MomentSequence::from_mu(mu); })
        .def_static("from_log_moments", &MomentSequence::from_log_moments)
        .def_property_readonly("n_max", &MomentSequence::n_max)
        .def_property_readonly("log_moments", &MomentSequence::log_moments)
        .def_property_readonly("mu", &MomentSequence::mu_values)
        .def("log_convexity_defect", &MomentSequence::log_convexity_defect);
    m.def("moment_sequence", &moment_sequence, py::arg("weight"), py::arg("n_max"));
    m.def(
        "ostrowski_rho",
        [](const MomentSequence& s, double r) {
            const auto v = ostrowski_rho(s, r);
            return py::make_tuple(v.log_rho, v.partial_sum, v.status == RhoStatus::Truncated);
        },
        py::arg("m"), py::arg("r"));
    m.def("log_integral", [](const Weight& w, const std::string& form) { return log_integral(w, parse_form(form)); },
          py::arg("weight"), py::arg("form") = "cauchy");
    m.def("pls_classify", [](const Weight& w) { return std::string(to_string(pls_classify(w))); }, py::arg("weight"));

    m.def("bang_degree", [](const MomentSequence& s, double neg_log_t) { return bang_degree({s, neg_log_t}); },
          py::arg("m"), py::arg("neg_log_t"));
    m.def("theta_1d", [](const MomentSequence& s, double l, double sv) { return theta_dict(theta_1d(s, l, sv)); },
          py::arg("m"), py::arg("neg_log_t"), py::arg("s"));
    m.def("theta_nd",
          [](const MomentSequence& s, int d, double l, double sv) { return theta_dict(theta_nd(s, d, l, sv)); },
          py::arg("m"), py::arg("d"), py::arg("neg_log_t"), py::arg("s"));
    m.def(
        "pls_constant",
        [](const Weight& w, int d, double c_w, double gamma, std::optional<double> A, int n_max) {
            const auto c = pls_constant(w, d, c_w, gamma, A ? *A : default_shift_base(d), n_max);
            py::dict out = theta_dict(c.theta);
            out["log_c"] = c.log_c.value;
            out["log_c_nested"] = c.log_c.nested;
            out["A"] = c.A;
            out["lambda"] = c.lambda;
            return out;
        },
        py::arg("weight"), py::arg("d"), py::arg("c_w") = 1.0, py::arg("gamma") = 0.5, py::arg("A") = std::nullopt,
        py::arg("n_max") = 400);

    py::class_<IntervalSet>(m, "IntervalSet")
        .def(py::init([](const std::vector<std::pair<double, double>>& pieces) {
                 std::vector<Interval> v;
                 for (const auto& [a, b] : pieces) v.push_back({a, b});
                 return IntervalSet(std::move(v));
             }),
             py::arg("pieces") = std::vector<std::pair<double, double>>{})
        .def_static("parse", py::overload_cast<const std::string&>(&IntervalSet::parse), py::arg("text"))
        .def_property_readonly("intervals",
                               [](const IntervalSet& s) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& p : s.intervals()) out.emplace_back(p.lo, p.hi);
                                   return out;
                               })
        .def("measure", &IntervalSet::measure)
        .def("contains", &IntervalSet::contains)
        .def("to_text", &IntervalSet::to_text)
        .def("__len__", &IntervalSet::size);
    m.def("cantor_set", [](int b, const std::vector<int>& D, int k, double L) { return cantor_set(b, D, k, L); },
          py::arg("base"), py::arg("digits"), py::arg("depth"), py::arg("scale") = 1.0);
    m.def("cantor_indices", [](int b, const std::vector<int>& D, int k) { return cantor_indices(b, D, k); },
          py::arg("base"), py::arg("digits"), py::arg("depth"));

    py::class_<CoverFamily>(m, "CoverFamily")
        .def_readonly("t", &CoverFamily::t)
        .def_readonly("regularized", &CoverFamily::regularized)
        .def("norm", &CoverFamily::norm)
        .def("card", &CoverFamily::card)
        .def("halves_disjoint", &CoverFamily::halves_disjoint)
        .def_property_readonly("scales", [](const CoverFamily& c) {
            py::list out;
            for (const auto& s : c.scales) {
                py::dict d;
                d["n"] = s.n;
                d["omega"] = s.omega;
                std::vector<std::pair<double, double>> iv;
                for (const auto& j : s.intervals) iv.emplace_back(j.lo, j.hi);
                d["intervals"] = iv;
                out.append(d);
            }
            return out;
        });
    m.def("omega_scale", &omega_scale, py::arg("weight"), py::arg("n"));
    m.def("greedy_short_cover", &greedy_short_cover, py::arg("q"), py::arg("weight"), py::arg("t"), py::arg("n_lo"),
          py::arg("n_hi"));
    m.def("regularize_cover", &regularize_cover, py::arg("cover"), py::arg("q"));
    m.def(
        "sparsity_norm_estimate",
        [](const IntervalSet& q, const Weight& w, const std::vector<double>& grid, int lo, int hi) {
            const auto s = sparsity_norm_estimate(q, w, grid, lo, hi);
            py::dict d;
            d["value"] = s.value;
            d["argmax_t"] = s.argmax_t;
            d["samples"] = s.samples;
            d["status"] = "LOWER_BOUND";
            return d;
        },
        py::arg("q"), py::arg("weight"), py::arg("grid"), py::arg("n_lo"), py::arg("n_hi"));
    m.def("phi_regular_cover_count", &phi_regular_cover_count, py::arg("q"), py::arg("t"), py::arg("N"),
          py::arg("ell"));
    m.def(
        "bourdyat_norm_bound",
        [](const std::vector<double>& phi, std::optional<double> exponent) { return bourdyat_norm_bound(phi, exponent); },
        py::arg("phi_values"), py::arg("exponent") = std::nullopt);

    m.def(
        "observability_constant",
        [](std::int64_t N, const std::vector<bool>& q, const std::vector<bool>& e, const std::string& method,
           std::uint64_t seed) {
            const auto r = observability_constant(N, q, e, parse_method(method), seed);
            py::dict d;
            d["N"] = r.N;
            d["Q_size"] = r.q_count;
            d["E_size"] = r.e_count;
            d["sigma_min"] = r.sigma_min;
            d["recovery_constant"] = r.recovery_constant;
            d["method"] = to_string(r.method);
            d["seed"] = r.seed;
            d["singular"] = r.singular;
            d["certified"] = r.certified;
            return d;
        },
        py::arg("N"), py::arg("freq_mask"), py::arg("space_mask"), py::arg("method") = "full", py::arg("seed") = 0);
    m.def("recovery_ratio",
          [](const std::vector<cplx>& f, const std::vector<bool>& e) { return recovery_ratio(f, e); },
          py::arg("samples"), py::arg("space_mask"));
    m.def(
        "plancherel_derivative_check",
        [](const std::vector<cplx>& f, int order) {
            const auto r = plancherel_derivative_check(f, order);
            return py::make_tuple(r.pass, r.ratio, r.rel_diff);
        },
        py::arg("samples"), py::arg("order"));
    m.def(
        "paley_wiener_profile",
        [](const MomentSequence& s, double eps, std::optional<int> n0, const std::vector<double>& grid) {
            const auto p = paley_wiener_profile(s, eps, n0, grid);
            py::dict d;
            d["values"] = p.values;
            d["n0"] = p.n0;
            d["tail_sum"] = p.tail_sum;
            d["log_m0"] = p.log_m0;
            d["support_halfwidth"] = p.support_halfwidth;
            return d;
        },
        py::arg("m"), py::arg("epsilon"), py::arg("n0") = std::nullopt, py::arg("xi_grid"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
