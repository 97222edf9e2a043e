#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tipcue/model.hpp"

namespace tipcue {

struct TipScoringParams {
    double theta{3.0};         // anomaly threshold (km for AIS)
    double alpha{0.5};         // deviation vs urgency balance
    double delta_lead_h{3.0};  // forecast lead time, hours
};

void validate(const TipScoringParams& p);

struct AnomalyObservation {
    GeoPoint predicted;
    GeoPoint actual;
    double time{};
};

struct FeedbackReport {
    std::vector<double> deltas;
    std::vector<double> weights;
    double threshold{};
};

/// Strict threshold test phi > theta. Throws ConfigError if theta <= 0.
bool anomaly_trigger(double phi, double theta);

/// Haversine distance between predicted and actual position.
double ais_error_km(const AnomalyObservation& obs);

/// 1 - cos(z, mean); throws Error for zero vectors or mismatched lengths.
double cosine_drift(std::span<const double> z, std::span<const double> hist_mean);

/// 1 - theta / phi. Throws Error("not a triggered tip") unless phi > theta.
double dev_score(double phi, double theta);

/// 1 / (1 + ln(1 + delta_lead)), lead time in hours.
double urg_score(double delta_lead_h);

/// alpha * dev_score + (1 - alpha) * urg_score.
double tip_score(const TipScoringParams& p, double phi);

/// Moving-target cue: `side_m` square following `trajectory`, utility
/// decaying at `decay_per_h` from the tip's detection time, priority = tip score.
Cue build_dynamic_cue(std::string id, const Tip& tip, std::vector<Waypoint> trajectory,
                      double decay_per_h, double side_m, FeasibilityConstraints fc = {});

/// Fixed rectangular cue with a Gaussian utility (sigma in seconds).
Cue build_static_cue(std::string id, GeoPoint center, double width_m, double height_m,
                     double priority, double t_peak, double sigma_s, FeasibilityConstraints fc = {});

/// Weighted sum of deviation components. Throws ConfigError if the report is
/// malformed (length mismatch, components outside [0, 1], weights not summing to 1).
double relevance(const FeedbackReport& report);

/// Strict threshold test r > theta on a relevance score.
bool feedback_trigger(double r, double theta);

// --- AIS inputs -------------------------------------------------------------

/// One line of a prediction file `mmsi,t,pred_lat,pred_lon,act_lat,act_lon`.
struct PredictionRow {
    std::string mmsi;
    double t{};
    GeoPoint predicted;
    GeoPoint actual;
};

/// One line of an AIS track file `mmsi,t,lat,lon,sog,cog`.
struct AisPoint {
    std::string mmsi;
    double t{};
    GeoPoint position;
    double sog_kn{};
    double cog_deg{};
};

std::vector<PredictionRow> load_predictions_csv(const std::filesystem::path& path);
std::vector<AisPoint> load_ais_csv(const std::filesystem::path& path);

/// Constant-velocity extrapolation (linear in lat/lon) through two fixes.
GeoPoint dead_reckon(double t0, GeoPoint p0, double t1, GeoPoint p1, double t);

/// For each fix, predicts its position from the two latest fixes of the same
/// vessel that are at least `lookback_s` older. Fixes without enough history
/// are skipped. Output is ordered by (t, mmsi).
std::vector<PredictionRow> predict_from_tracks(std::span<const AisPoint> track, double lookback_s);

struct AisTip {
    Tip tip;
    std::string mmsi;
    GeoPoint position;  // observed vessel position at detection
    double error_km{};
};

/// Scores every row with t <= cutoff whose prediction error exceeds theta.
/// The tip region is a `side_m` square around the observed position.
std::vector<AisTip> extract_ais_tips(std::span<const PredictionRow> rows, const TipScoringParams& p,
                                     double cutoff, double side_m);

/// Track of the tipped vessel: the observed position at detection, then
/// dead-reckoned positions every `step_s` up to `until`, using the two most
/// recent observed fixes at or before detection. A vessel seen only once
/// yields a single waypoint.
std::vector<Waypoint> tip_trajectory(const AisTip& tip, std::span<const PredictionRow> rows,
                                     double until, double step_s);

}  // namespace tipcue
