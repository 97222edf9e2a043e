#include "tipcue/windows.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "tipcue/error.hpp"

namespace tipcue {

WindowSet::WindowSet(std::vector<TimeInterval> intervals) {
    for (const auto& iv : intervals) {
        if (!std::isfinite(iv.start) || !std::isfinite(iv.end) || iv.start > iv.end) {
            throw ConfigError("time interval must satisfy start <= end");
        }
    }
    // Merge per satellite first, then order globally.
    std::sort(intervals.begin(), intervals.end(), [](const TimeInterval& a, const TimeInterval& b) {
        return std::tie(a.satellite_id, a.start, a.end) < std::tie(b.satellite_id, b.start, b.end);
    });
    std::vector<TimeInterval> merged;
    for (auto& iv : intervals) {
        if (!merged.empty() && merged.back().satellite_id == iv.satellite_id &&
            iv.start <= merged.back().end) {
            merged.back().end = std::max(merged.back().end, iv.end);
        } else {
            merged.push_back(std::move(iv));
        }
    }
    std::sort(merged.begin(), merged.end(), [](const TimeInterval& a, const TimeInterval& b) {
        return std::tie(a.start, a.end, a.satellite_id) < std::tie(b.start, b.end, b.satellite_id);
    });
    intervals_ = std::move(merged);
}

std::vector<Range> WindowSet::merged() const {
    std::vector<Range> out;
    for (const auto& iv : intervals_) {
        if (!out.empty() && iv.start <= out.back().second) {
            out.back().second = std::max(out.back().second, iv.end);
        } else {
            out.emplace_back(iv.start, iv.end);
        }
    }
    return out;
}

double WindowSet::measure() const {
    double total = 0.0;
    for (const auto& [lo, hi] : merged()) total += hi - lo;
    return total;
}

bool WindowSet::contains(double t) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [t](const TimeInterval& iv) { return iv.contains(t); });
}

Projection WindowSet::project(double t, std::optional<std::string_view> prefer) const {
    if (intervals_.empty()) throw Error("no feasible window");
    std::size_t best = 0;
    double best_dist = HUGE_VAL;
    double best_time = t;
    bool best_preferred = false;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto& iv = intervals_[i];
        const double p = std::clamp(t, iv.start, iv.end);
        const double dist = std::abs(p - t);
        const bool preferred = prefer && iv.satellite_id == *prefer;
        // Strictly closer wins; on ties only a preferred satellite may displace
        // an earlier candidate.
        if (dist < best_dist || (dist == best_dist && preferred && !best_preferred)) {
            best = i;
            best_dist = dist;
            best_time = p;
            best_preferred = preferred;
        }
    }
    return {best_time, best};
}

WindowSet WindowSet::clipped(double lo, double hi) const {
    std::vector<TimeInterval> out;
    for (const auto& iv : intervals_) {
        const double s = std::max(iv.start, lo);
        const double e = std::min(iv.end, hi);
        if (s <= e) out.push_back({s, e, iv.satellite_id});
    }
    return WindowSet(std::move(out));
}

double overlap_length(std::span<const Range> a, std::span<const Range> b) {
    double total = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double lo = std::max(a[i].first, b[j].first);
        const double hi = std::min(a[i].second, b[j].second);
        if (hi > lo) total += hi - lo;
        if (a[i].second < b[j].second) {
            ++i;
        } else {
            ++j;
        }
    }
    return total;
}

double interval_overlap_length(const WindowSet& a, const WindowSet& b) {
    const auto ma = a.merged();
    const auto mb = b.merged();
    return overlap_length(ma, mb);
}

std::vector<Range> subtract_ranges(Range base, std::vector<Range> forbidden) {
    std::sort(forbidden.begin(), forbidden.end());
    std::vector<Range> out;
    double cursor = base.first;
    for (const auto& [lo, hi] : forbidden) {
        if (hi < cursor) continue;
        if (lo > base.second) break;
        if (lo > cursor) out.emplace_back(cursor, lo);
        cursor = std::max(cursor, hi);
        if (cursor > base.second) return out;
    }
    out.emplace_back(cursor, base.second);
    return out;
}

}  // namespace tipcue
