#include "tipcue/tips.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "csv.hpp"
#include "tipcue/error.hpp"

namespace tipcue {

void validate(const TipScoringParams& p) {
    if (!(p.theta > 0.0)) throw ConfigError("tip threshold theta must be positive");
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw ConfigError("tip alpha must lie in [0, 1]");
    if (!(p.delta_lead_h >= 0.0)) throw ConfigError("lead time must be non-negative");
}

bool anomaly_trigger(double phi, double theta) {
    if (!(theta > 0.0)) throw ConfigError("anomaly threshold must be positive");
    return phi > theta;
}

double ais_error_km(const AnomalyObservation& obs) { return haversine_km(obs.predicted, obs.actual); }

double cosine_drift(std::span<const double> z, std::span<const double> hist_mean) {
    if (z.size() != hist_mean.size() || z.empty()) throw Error("embedding lengths differ");
    const double dot = std::inner_product(z.begin(), z.end(), hist_mean.begin(), 0.0);
    const double nz = std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
    const double nm = std::sqrt(std::inner_product(hist_mean.begin(), hist_mean.end(), hist_mean.begin(), 0.0));
    if (nz == 0.0 || nm == 0.0) throw Error("cosine drift of a zero vector");
    return 1.0 - std::clamp(dot / (nz * nm), -1.0, 1.0);
}

double dev_score(double phi, double theta) {
    if (!(phi > theta)) throw Error("not a triggered tip");
    return 1.0 - theta / phi;
}

double urg_score(double delta_lead_h) {
    if (!(delta_lead_h >= 0.0)) throw ConfigError("lead time must be non-negative");
    return 1.0 / (1.0 + std::log1p(delta_lead_h));
}

double tip_score(const TipScoringParams& p, double phi) {
    validate(p);
    return p.alpha * dev_score(phi, p.theta) + (1.0 - p.alpha) * urg_score(p.delta_lead_h);
}

Cue build_dynamic_cue(std::string id, const Tip& tip, std::vector<Waypoint> trajectory,
                      double decay_per_h, double side_m, FeasibilityConstraints fc) {
    if (trajectory.empty()) throw ConfigError("dynamic cue needs a non-empty trajectory");
    if (!(decay_per_h > 0.0)) throw ConfigError("decay rate must be positive");
    validate(fc);
    return Cue{std::move(id), Footprint::trajectory(std::move(trajectory), side_m),
               UtilityFunction::exp_decay(tip.detect_time, decay_per_h / kSecondsPerHour, tip.score),
               fc, tip};
}

Cue build_static_cue(std::string id, GeoPoint center, double width_m, double height_m,
                     double priority, double t_peak, double sigma_s, FeasibilityConstraints fc) {
    if (!(width_m > 0.0 && height_m > 0.0)) throw ConfigError("static cue dimensions must be positive");
    validate(fc);
    return Cue{std::move(id), Footprint::fixed(enu_rectangle(center, width_m, height_m)),
               UtilityFunction::gaussian(t_peak, sigma_s, priority), fc, std::nullopt};
}

double relevance(const FeedbackReport& report) {
    if (report.deltas.size() != report.weights.size() || report.deltas.empty()) {
        throw ConfigError("feedback report needs one weight per deviation component");
    }
    double wsum = 0.0, r = 0.0;
    for (std::size_t k = 0; k < report.deltas.size(); ++k) {
        const double d = report.deltas[k], w = report.weights[k];
        if (!(d >= 0.0 && d <= 1.0) || !(w >= 0.0 && w <= 1.0)) {
            throw ConfigError("feedback components and weights must lie in [0, 1]");
        }
        wsum += w;
        r += w * d;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("feedback weights must sum to 1");
    return std::clamp(r, 0.0, 1.0);
}

bool feedback_trigger(double r, double theta) { return r > theta; }

std::vector<PredictionRow> load_predictions_csv(const std::filesystem::path& path) {
    csv::Reader reader(path, "mmsi,t,pred_lat,pred_lon,act_lat,act_lon");
    std::vector<PredictionRow> rows;
    for (const auto& row : reader.rows()) {
        reader.expect_columns(row);
        PredictionRow r{std::string(row.fields[0]), reader.number(row, 1),
                        {reader.number(row, 2), reader.number(row, 3)},
                        {reader.number(row, 4), reader.number(row, 5)}};
        if (r.mmsi.empty()) reader.fail(row, "empty mmsi");
        if (!is_valid(r.predicted) || !is_valid(r.actual)) reader.fail(row, "coordinates out of range");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<AisPoint> load_ais_csv(const std::filesystem::path& path) {
    csv::Reader reader(path, "mmsi,t,lat,lon,sog,cog");
    std::vector<AisPoint> pts;
    for (const auto& row : reader.rows()) {
        reader.expect_columns(row);
        AisPoint p{std::string(row.fields[0]), reader.number(row, 1),
                   {reader.number(row, 2), reader.number(row, 3)}, reader.number(row, 4),
                   reader.number(row, 5)};
        if (p.mmsi.empty()) reader.fail(row, "empty mmsi");
        if (!is_valid(p.position)) reader.fail(row, "coordinates out of range");
        pts.push_back(std::move(p));
    }
    return pts;
}

GeoPoint dead_reckon(double t0, GeoPoint p0, double t1, GeoPoint p1, double t) {
    if (t1 == t0) return p1;
    const double f = (t - t1) / (t1 - t0);
    return {p1.lat_deg + f * (p1.lat_deg - p0.lat_deg), p1.lon_deg + f * (p1.lon_deg - p0.lon_deg)};
}

std::vector<PredictionRow> predict_from_tracks(std::span<const AisPoint> track, double lookback_s) {
    std::map<std::string, std::vector<const AisPoint*>> by_vessel;
    for (const auto& p : track) by_vessel[p.mmsi].push_back(&p);
    std::vector<PredictionRow> out;
    for (auto& [mmsi, pts] : by_vessel) {
        std::stable_sort(pts.begin(), pts.end(), [](const AisPoint* a, const AisPoint* b) { return a->t < b->t; });
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double horizon = pts[k]->t - lookback_s;
            // last index with t <= horizon
            auto it = std::upper_bound(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(k), horizon,
                                       [](double v, const AisPoint* p) { return v < p->t; });
            const auto n_hist = static_cast<std::size_t>(it - pts.begin());
            if (n_hist < 2) continue;
            const AisPoint* a = pts[n_hist - 2];
            const AisPoint* b = pts[n_hist - 1];
            out.push_back({mmsi, pts[k]->t, dead_reckon(a->t, a->position, b->t, b->position, pts[k]->t),
                           pts[k]->position});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const PredictionRow& a, const PredictionRow& b) {
        return std::tie(a.t, a.mmsi) < std::tie(b.t, b.mmsi);
    });
    return out;
}

std::vector<AisTip> extract_ais_tips(std::span<const PredictionRow> rows, const TipScoringParams& p,
                                     double cutoff, double side_m) {
    validate(p);
    std::vector<AisTip> tips;
    for (const auto& row : rows) {
        if (row.t > cutoff) continue;
        const double err = ais_error_km({row.predicted, row.actual, row.t});
        if (!anomaly_trigger(err, p.theta)) continue;
        Tip tip{enu_rectangle(row.actual, side_m, side_m), row.t, tip_score(p, err), TipSource::External};
        tips.push_back({std::move(tip), row.mmsi, row.actual, err});
    }
    return tips;
}

std::vector<Waypoint> tip_trajectory(const AisTip& tip, std::span<const PredictionRow> rows, double until,
                                     double step_s) {
    std::vector<const PredictionRow*> fixes;
    for (const auto& r : rows) {
        if (r.mmsi == tip.mmsi && r.t <= tip.tip.detect_time) fixes.push_back(&r);
    }
    std::stable_sort(fixes.begin(), fixes.end(), [](auto* a, auto* b) { return a->t < b->t; });
    const double t0 = tip.tip.detect_time;
    std::vector<Waypoint> wp{{t0, tip.position}};
    if (fixes.size() < 2 || !(step_s > 0.0)) return wp;
    const PredictionRow* a = fixes[fixes.size() - 2];
    const PredictionRow* b = fixes.back();
    if (!(b->t > a->t)) return wp;
    for (double t = t0 + step_s; t <= until + step_s; t += step_s) {
        // Anchor the motion at the detection fix.
        const GeoPoint p = dead_reckon(a->t, a->actual, b->t, b->actual, t);
        const GeoPoint at0 = dead_reckon(a->t, a->actual, b->t, b->actual, t0);
        wp.push_back({t, {tip.position.lat_deg + p.lat_deg - at0.lat_deg,
                          tip.position.lon_deg + p.lon_deg - at0.lon_deg}});
    }
    return wp;
}

}  // namespace tipcue
