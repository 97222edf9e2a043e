#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tipcue {

/// Closed access interval [start, end] (epoch seconds) provided by one satellite.
/// Degenerate point intervals are allowed.
struct TimeInterval {
    double start{};
    double end{};
    std::string satellite_id;

    double length() const { return end - start; }
    bool contains(double t) const { return t >= start && t <= end; }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Plain closed range without a satellite tag.
using Range = std::pair<double, double>;

struct Projection {
    double time{};
    std::size_t interval{};  // index into WindowSet::intervals()
};

/// Feasible acquisition times of one cue: a finite union of closed intervals,
/// sorted by start and pairwise disjoint per satellite. Intervals of different
/// satellites may overlap in time.
class WindowSet {
public:
    WindowSet() = default;

    /// Sorts and merges overlapping or touching intervals of the same satellite.
    /// Throws ConfigError if any interval has start > end or non-finite bounds.
    explicit WindowSet(std::vector<TimeInterval> intervals);

    std::span<const TimeInterval> intervals() const { return intervals_; }
    const TimeInterval& operator[](std::size_t i) const { return intervals_[i]; }
    std::size_t size() const { return intervals_.size(); }
    bool empty() const { return intervals_.empty(); }

    /// Union of all intervals with satellite tags dropped, sorted and disjoint.
    std::vector<Range> merged() const;

    /// Lebesgue measure of the time union.
    double measure() const;

    bool contains(double t) const;

    /// Nearest feasible time to `t`. A point already inside an interval is
    /// returned unchanged; among intervals containing it the one whose
    /// satellite equals `prefer` wins, otherwise the earliest. Equidistant
    /// candidates resolve the same way, then toward the earlier interval.
    /// Throws Error("no feasible window") when empty.
    Projection project(double t, std::optional<std::string_view> prefer = std::nullopt) const;

    /// Intersection with the closed range [lo, hi]; intervals that vanish are dropped.
    WindowSet clipped(double lo, double hi) const;

    friend bool operator==(const WindowSet&, const WindowSet&) = default;

private:
    std::vector<TimeInterval> intervals_;
};

/// Measure of the purely temporal intersection of the two unions.
double interval_overlap_length(const WindowSet& a, const WindowSet& b);

/// Measure of the intersection of two sorted disjoint range lists.
double overlap_length(std::span<const Range> a, std::span<const Range> b);

/// Removes every forbidden range from `base`. Forbidden ranges may overlap
/// and be unsorted. The survivors are returned as closed ranges that share
/// their boundary points with the forbidden ranges.
std::vector<Range> subtract_ranges(Range base, std::vector<Range> forbidden);

}  // namespace tipcue
