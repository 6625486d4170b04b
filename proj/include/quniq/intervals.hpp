#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace quniq {

struct Interval {
    double lo;
    double hi;

    double length() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
    /// Concentric interval scaled by `factor` (2J, 3J, J/2, ...).
    Interval dilate(double factor) const;
    bool operator==(const Interval&) const = default;
};

/// Finite union of closed intervals, kept sorted with touching pieces merged.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> pieces);

    const std::vector<Interval>& intervals() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }
    std::size_t size() const { return pieces_.size(); }
    double measure() const;
    double measure_in(double lo, double hi) const;
    bool contains(double x) const;

    IntervalSet translated(double shift) const;  // {x + shift}
    IntervalSet intersect(double lo, double hi) const;
    IntervalSet intersect(const IntervalSet& other) const;

    /// min over x in [lo, hi - width] of measure(E n [x, x + width]).
    double min_window_measure(double width, double lo, double hi) const;

    /// One "a b" pair per line, '#' starts a comment. Throws ParseError.
    static IntervalSet parse(std::istream& in);
    static IntervalSet parse(const std::string& text);
    std::string to_text() const;

private:
    std::vector<Interval> pieces_;
};

/// Union of |D|^k intervals of length L b^{-k} in [0, L] whose base-b digits lie in D.
IntervalSet cantor_set(int base, std::span<const int> digits, int depth, double scale);

/// Integers in [0, base^depth) whose base-b digits all lie in D.
std::vector<std::int64_t> cantor_indices(int base, std::span<const int> digits, int depth);

}  // namespace quniq
