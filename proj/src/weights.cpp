#include "quniq/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "quniq/error.hpp"

namespace quniq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

double tabulated_profile(const Tabulated& tab, double s) {
    const auto& k = tab.knots;
    if (s <= k.front().first) return s < 0.0 ? 0.0 : k.front().second;
    if (s >= k.back().first) {
        if (s == k.back().first) return k.back().second;
        double slope;
        if (tab.extrapolation_slope) {
            slope = *tab.extrapolation_slope;
            if (std::isinf(slope)) return kInf;
        } else {
            const auto& a = k[k.size() - 2];
            const auto& b = k.back();
            slope = (b.second - a.second) / (b.first - a.first);
        }
        return k.back().second + slope * (s - k.back().first);
    }
    auto it = std::upper_bound(k.begin(), k.end(), s,
                               [](double v, const auto& knot) { return v < knot.first; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double u = (s - a.first) / (b.first - a.first);
    return a.second + u * (b.second - a.second);
}

double parse_double(std::string_view text) {
    std::string s(text);
    // trim
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw Error(ErrorCode::ParseError, "empty number");
    s = s.substr(first, last - first + 1);
    if (s == "inf" || s == "+inf") return kInf;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
    }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Weight Weight::band_limit(double band) {
    // W = 1 on [0, 1] is required of every admissible weight.
    require(std::isfinite(band) && band >= 1.0, "BandLimit band must be >= 1");
    return Weight(BandLimit{band});
}

Weight Weight::power_exp(double c, double alpha) {
    require(std::isfinite(c) && c > 0.0, "PowerExp c must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "PowerExp alpha must lie in (0, 1]");
    return Weight(PowerExp{c, alpha});
}

Weight Weight::end_point(double delta, double c) {
    require(delta > 0.0 && delta <= 1.0, "EndPoint delta must lie in (0, 1]");
    require(std::isfinite(c) && c > 0.0, "EndPoint c must be positive");
    return Weight(EndPoint{delta, c});
}

Weight Weight::tabulated(std::vector<std::pair<double, double>> knots,
                         std::optional<double> extrapolation_slope) {
    require(knots.size() >= 2, "Tabulated weight needs at least two knots");
    require(knots.front().first == 0.0 && knots.front().second == 0.0,
            "Tabulated weight must start at knot (0, 0) so that W = 1 on [0, 1]");
    double prev_slope = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double ds = knots[i].first - knots[i - 1].first;
        require(std::isfinite(knots[i].first) && std::isfinite(knots[i].second) && ds > 0.0,
                "Tabulated knots must be finite with strictly increasing log t");
        const double slope = (knots[i].second - knots[i - 1].second) / ds;
        require(slope >= 0.0, "Tabulated log W must be nondecreasing");
        require(slope >= prev_slope * (1.0 - 1e-12) - 1e-12, "Tabulated knots must be convex");
        prev_slope = slope;
    }
    if (extrapolation_slope) {
        require(*extrapolation_slope >= prev_slope * (1.0 - 1e-12) - 1e-12,
                "extrapolation slope must keep the profile convex");
    }
    return Weight(Tabulated{std::move(knots), extrapolation_slope});
}

std::string Weight::family_name() const {
    return std::visit(Overloaded{[](const BandLimit&) { return std::string("band"); },
                                 [](const PowerExp&) { return std::string("powerexp"); },
                                 [](const EndPoint&) { return std::string("endpoint"); },
                                 [](const Tabulated&) { return std::string("tabulated"); }},
                      family_);
}

double Weight::log_value(double t) const {
    return std::visit(
        Overloaded{
            [t](const BandLimit& b) { return t <= b.band ? 0.0 : kInf; },
            [t](const PowerExp& p) { return t < 1.0 ? 0.0 : p.c * std::pow(t, p.alpha); },
            [t](const EndPoint& e) {
                return e.c * t / std::pow(std::log(std::numbers::e + t), e.delta);
            },
            [t](const Tabulated& tab) { return t < 1.0 ? 0.0 : tabulated_profile(tab, std::log(t)); }},
        family_);
}

double Weight::log_value_at_log(double s) const {
    return std::visit(
        Overloaded{
            [s](const BandLimit& b) { return s <= std::log(b.band) ? 0.0 : kInf; },
            [s](const PowerExp& p) { return s < 0.0 ? 0.0 : p.c * std::exp(p.alpha * s); },
            [s](const EndPoint& e) {
                const double t = std::exp(s);
                return e.c * t / std::pow(std::log(std::numbers::e + t), e.delta);
            },
            [s](const Tabulated& tab) { return tabulated_profile(tab, s); }},
        family_);
}

double Weight::finiteness_radius() const {
    return std::visit(Overloaded{[](const BandLimit& b) { return b.band; },
                                 [](const PowerExp&) { return kInf; },
                                 [](const EndPoint&) { return kInf; },
                                 [](const Tabulated& tab) {
                                     if (tab.extrapolation_slope && std::isinf(*tab.extrapolation_slope)) {
                                         return std::exp(tab.knots.back().first);
                                     }
                                     return kInf;
                                 }},
                      family_);
}

std::optional<double> Weight::asymptotic_exponent() const {
    return std::visit(Overloaded{[](const BandLimit&) -> std::optional<double> { return kInf; },
                                 [](const PowerExp& p) -> std::optional<double> { return p.alpha; },
                                 [](const EndPoint&) -> std::optional<double> { return 1.0; },
                                 [](const Tabulated& tab) { return tab.extrapolation_slope; }},
                      family_);
}

double weight_profile_violation(const Weight& w, std::span<const double> log_points) {
    double worst = 0.0;
    std::vector<double> values;
    values.reserve(log_points.size());
    for (double s : log_points) values.push_back(w.log_value_at_log(s));
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (std::isinf(values[i - 1])) continue;
        worst = std::max(worst, values[i - 1] - values[i]);
    }
    for (std::size_t i = 2; i < values.size(); ++i) {
        const double s0 = log_points[i - 2], s1 = log_points[i - 1], s2 = log_points[i];
        const double v0 = values[i - 2], v1 = values[i - 1], v2 = values[i];
        if (std::isinf(v2)) continue;
        const double u = (s1 - s0) / (s2 - s0);
        const double chord = (1.0 - u) * v0 + u * v2;
        const double scale = std::max({1.0, std::abs(v0), std::abs(v2)});
        worst = std::max(worst, (v1 - chord) / scale);
    }
    return worst;
}

Weight parse_weight_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::ParseError, "weight spec must look like FAMILY:params");
    }
    const std::string_view family = spec.substr(0, colon);
    const std::string_view params = spec.substr(colon + 1);
    try {
        if (family == "band") {
            return Weight::band_limit(parse_double(params));
        }
        if (family == "powerexp" || family == "endpoint") {
            const auto parts = split(params, ',');
            if (parts.size() != 2) throw Error(ErrorCode::ParseError, "expected two parameters");
            const double a = parse_double(parts[0]);
            const double b = parse_double(parts[1]);
            return family == "powerexp" ? Weight::power_exp(a, b) : Weight::end_point(a, b);
        }
        if (family == "tabulated") {
            std::optional<double> slope;
            std::string_view knot_text = params;
            if (const auto at = params.find('@'); at != std::string_view::npos) {
                slope = parse_double(params.substr(at + 1));
                knot_text = params.substr(0, at);
            }
            std::vector<std::pair<double, double>> knots;
            for (auto item : split(knot_text, ';')) {
                const auto pair = split(item, '/');
                if (pair.size() != 2) throw Error(ErrorCode::ParseError, "knot must be s/logW");
                knots.emplace_back(parse_double(pair[0]), parse_double(pair[1]));
            }
            return Weight::tabulated(std::move(knots), slope);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        throw Error(ErrorCode::ParseError, e.what());
    }
    throw Error(ErrorCode::ParseError, "unknown weight family '" + std::string(family) + "'");
}

std::string weight_spec(const Weight& w) {
    return std::visit(
        Overloaded{[](const BandLimit& b) { return "band:" + format_double(b.band); },
                   [](const PowerExp& p) {
                       return "powerexp:" + format_double(p.c) + "," + format_double(p.alpha);
                   },
                   [](const EndPoint& e) {
                       return "endpoint:" + format_double(e.delta) + "," + format_double(e.c);
                   },
                   [](const Tabulated& tab) {
                       std::string out = "tabulated:";
                       for (std::size_t i = 0; i < tab.knots.size(); ++i) {
                           if (i) out += ';';
                           out += format_double(tab.knots[i].first) + "/" + format_double(tab.knots[i].second);
                       }
                       if (tab.extrapolation_slope) out += "@" + format_double(*tab.extrapolation_slope);
                       return out;
                   }},
        w.family());
}

std::string to_record(const Weight& w, int n_max) {
    std::ostringstream os;
    os << "family=" << w.family_name() << '\n';
    std::visit(Overloaded{[&](const BandLimit& b) { os << "band=" << format_double(b.band) << '\n'; },
                          [&](const PowerExp& p) {
                              os << "c=" << format_double(p.c) << '\n'
                                 << "alpha=" << format_double(p.alpha) << '\n';
                          },
                          [&](const EndPoint& e) {
                              os << "delta=" << format_double(e.delta) << '\n'
                                 << "c=" << format_double(e.c) << '\n';
                          },
                          [&](const Tabulated& tab) {
                              os << "knots=";
                              for (std::size_t i = 0; i < tab.knots.size(); ++i) {
                                  if (i) os << ';';
                                  os << format_double(tab.knots[i].first) << '/'
                                     << format_double(tab.knots[i].second);
                              }
                              os << '\n';
                          }},
               w.family());
    os << "n_max=" << n_max << '\n';
    const auto exponent = w.asymptotic_exponent();
    os << "asymptotic_exponent=" << (exponent ? format_double(*exponent) : "none") << '\n';
    return os.str();
}

WeightRecord from_record(std::string_view text) {
    std::map<std::string, std::string, std::less<>> fields;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "record line without '=': " + line);
        auto key = line.substr(0, eq);
        auto value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t\r") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        fields[key] = value;
    }
    auto get = [&](const std::string& key) -> const std::string& {
        const auto it = fields.find(key);
        if (it == fields.end()) throw Error(ErrorCode::ParseError, "record missing field '" + key + "'");
        return it->second;
    };
    const std::string& family = get("family");
    std::string spec;
    if (family == "band") {
        spec = "band:" + get("band");
    } else if (family == "powerexp") {
        spec = "powerexp:" + get("c") + "," + get("alpha");
    } else if (family == "endpoint") {
        spec = "endpoint:" + get("delta") + "," + get("c");
    } else if (family == "tabulated") {
        spec = "tabulated:" + get("knots");
        const std::string& exponent = get("asymptotic_exponent");
        if (exponent != "none") spec += "@" + exponent;
    } else {
        throw Error(ErrorCode::ParseError, "unknown weight family '" + family + "'");
    }
    const double n_max = parse_double(get("n_max"));
    if (!(n_max >= 1.0) || n_max != std::floor(n_max) || n_max > 1e8) {
        throw Error(ErrorCode::ParseError, "n_max must be a positive integer");
    }
    return {parse_weight_spec(spec), static_cast<int>(n_max)};
}

}  // namespace quniq
