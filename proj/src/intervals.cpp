#include "quniq/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

#include "quniq/error.hpp"

namespace quniq {

Interval Interval::dilate(double factor) const {
    const double half = 0.5 * factor * length();
    const double c = center();
    return {c - half, c + half};
}

IntervalSet::IntervalSet(std::vector<Interval> pieces) {
    for (const auto& p : pieces) {
        if (!(p.lo <= p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi)) {
            throw Error(ErrorCode::InvalidArgument, "interval endpoints must be finite with a <= b");
        }
    }
    std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& p : pieces) {
        if (!pieces_.empty() && p.lo <= pieces_.back().hi) {
            pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
        } else {
            pieces_.push_back(p);
        }
    }
}

double IntervalSet::measure() const {
    double total = 0.0;
    for (const auto& p : pieces_) total += p.length();
    return total;
}

double IntervalSet::measure_in(double lo, double hi) const {
    double total = 0.0;
    for (const auto& p : pieces_) {
        const double a = std::max(lo, p.lo);
        const double b = std::min(hi, p.hi);
        if (b > a) total += b - a;
    }
    return total;
}

bool IntervalSet::contains(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Interval& p) { return v < p.lo; });
    if (it == pieces_.begin()) return false;
    --it;
    return x <= it->hi;
}

IntervalSet IntervalSet::translated(double shift) const {
    IntervalSet out;
    out.pieces_.reserve(pieces_.size());
    for (const auto& p : pieces_) out.pieces_.push_back({p.lo + shift, p.hi + shift});
    return out;
}

IntervalSet IntervalSet::intersect(double lo, double hi) const {
    IntervalSet out;
    for (const auto& p : pieces_) {
        const double a = std::max(lo, p.lo);
        const double b = std::min(hi, p.hi);
        if (a <= b) out.pieces_.push_back({a, b});
    }
    return out;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < pieces_.size() && j < other.pieces_.size()) {
        const auto& a = pieces_[i];
        const auto& b = other.pieces_[j];
        const double lo = std::max(a.lo, b.lo);
        const double hi = std::min(a.hi, b.hi);
        if (lo <= hi) out.push_back({lo, hi});
        if (a.hi < b.hi) ++i; else ++j;
    }
    return IntervalSet(std::move(out));
}

double IntervalSet::min_window_measure(double width, double lo, double hi) const {
    if (hi - lo < width) throw Error(ErrorCode::InvalidArgument, "window range shorter than the window");
    // The windowed measure is piecewise linear in x; extremes sit where x or
    // x + width meets an endpoint, or at the range ends.
    std::vector<double> candidates{lo, hi - width};
    for (const auto& p : pieces_) {
        for (double e : {p.lo, p.hi}) {
            for (double x : {e, e - width}) {
                if (x >= lo && x <= hi - width) candidates.push_back(x);
            }
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (double x : candidates) best = std::min(best, measure_in(x, x + width));
    return best;
}

IntervalSet IntervalSet::parse(std::istream& in) {
    std::vector<Interval> pieces;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'a b'");
        }
        std::string rest;
        if (!(ls >> b) || (ls >> rest)) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'a b'");
        }
        if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": need finite a <= b");
        }
        pieces.push_back({a, b});
    }
    return IntervalSet(std::move(pieces));
}

IntervalSet IntervalSet::parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

std::string IntervalSet::to_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto& p : pieces_) os << p.lo << ' ' << p.hi << '\n';
    return os.str();
}

std::vector<std::int64_t> cantor_indices(int base, std::span<const int> digits, int depth) {
    if (base < 2) throw Error(ErrorCode::InvalidArgument, "base must be >= 2");
    if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
    if (digits.empty()) throw Error(ErrorCode::InvalidArgument, "digit set must be non-empty");
    std::vector<int> d(digits.begin(), digits.end());
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    for (int v : d) {
        if (v < 0 || v >= base) throw Error(ErrorCode::InvalidArgument, "digits must lie in [0, base)");
    }
    if (depth * std::log2(static_cast<double>(base)) > 62.0) {
        throw Error(ErrorCode::InvalidArgument, "base^depth overflows 64-bit indices");
    }
    std::vector<std::int64_t> out{0};
    for (int level = 0; level < depth; ++level) {
        std::vector<std::int64_t> next;
        next.reserve(out.size() * d.size());
        for (auto x : out) {
            for (int v : d) next.push_back(x * base + v);
        }
        out = std::move(next);
    }
    return out;
}

IntervalSet cantor_set(int base, std::span<const int> digits, int depth, double scale) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    const auto idx = cantor_indices(base, digits, depth);
    const double count = std::pow(static_cast<double>(base), depth);
    std::vector<Interval> pieces;
    pieces.reserve(idx.size());
    for (auto i : idx) {
        pieces.push_back({scale * static_cast<double>(i) / count, scale * static_cast<double>(i + 1) / count});
    }
    return IntervalSet(std::move(pieces));
}

}  // namespace quniq
