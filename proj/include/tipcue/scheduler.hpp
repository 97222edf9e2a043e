#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tipcue/model.hpp"
#include "tipcue/visibility.hpp"
#include "tipcue/windows.hpp"

namespace tipcue {

struct RankingParams {
    double lambda{0.5};
};

/// kappa(d, delta) = max(0, 1 - (d/delta)^r)^beta, weighted by rho in the loss.
/// `margin` widens every separation buffer the optimizer and the refinement
/// pass work with, so their results clear the exact buffer.
struct PenaltyParams {
    double r{1.0};
    double beta{2.0};
    double rho{100.0};
    double margin{0.01};
};

struct OptimizerConfig {
    double eta{0.01};       // in hours per unit gradient (see time_unit_s)
    double epsilon{1e-3};
    int max_iters{500};
    std::optional<double> lipschitz_estimate;
    double time_unit_s{kSecondsPerHour};
};

/// Per-satellite separation: dwell plus the slew over the look-angle change.
struct SeparationModel {
    double t_img{};
    double slew_rate_deg_s{};

    static SeparationModel of(const Satellite& sat) { return {sat.dwell_time_s, sat.slew_rate_deg_s}; }
    double buffer(double gamma_deg) const { return t_img + gamma_deg / slew_rate_deg_s; }
};

void validate(const RankingParams& p);
void validate(const PenaltyParams& p);
void validate(const OptimizerConfig& oc);

/// 1 - mean normalized overlap of W_i with every other window set, clamped
/// to [0, 1]. Returns 1 for a single cue or a zero-measure W_i.
/// Throws Error when W_i is empty.
double availability(std::size_t i, std::span<const WindowSet> windows);

/// Indices of cues with non-empty windows, by descending
/// lambda * availability + (1 - lambda) * max utility; ties by cue id.
std::vector<std::size_t> rank(std::span<const Cue> cues, std::span<const WindowSet> windows,
                              const RankingParams& p);

/// Look-angle change (deg) seen from the satellite at min(ti, tj).
double slew_angle_deg(double ti, double tj, const Cue& cue_i, const Cue& cue_j, const Satellite& sat);

/// Exact time-dependent separation buffer, seconds.
double delta_ij(double ti, double tj, const Cue& cue_i, const Cue& cue_j, const Satellite& sat);

double kappa(double d, double delta, const PenaltyParams& p);
/// d kappa / d d.
double kappa_slope(double d, double delta, const PenaltyParams& p);
/// max |d^2 kappa / d d^2| for delta = 1, sampled on (0, 1].
double kappa_curvature_bound(const PenaltyParams& p);

/// Members of one optimization problem: cue indices plus per-member satellite
/// index (into the satellite list).
struct Assignment {
    std::vector<std::size_t> cues;
    std::vector<double> times;
    std::vector<std::size_t> sats;
};

/// Sum of kappa over same-satellite pairs with exact buffers.
double penalty(const Assignment& a, std::span<const Cue> cues, std::span<const Satellite> sats,
               const PenaltyParams& p);

/// Separation buffer of a same-satellite pair held fixed during one step.
struct FrozenPair {
    std::size_t a{};  // member positions in the Assignment
    std::size_t b{};
    double delta{};
};

/// Buffers at the current times, widened by the margin. Pairs already apart
/// by more than any buffer the satellite could need are left out.
std::vector<FrozenPair> freeze_pairs(const Assignment& a, std::span<const Cue> cues,
                                     std::span<const Satellite> sats, const PenaltyParams& p);

struct LossGrad {
    double loss{};
    std::vector<double> grad;  // per member, per time unit
};

/// L = -sum u_i(t_i) + rho * sum kappa(|t_a - t_b|, delta_ab) with frozen
/// buffers. The gradient is taken with time in units of `time_unit_s`
/// seconds. At equal times the earlier member in the list counts as earlier.
LossGrad loss_and_grad(std::span<const double> times, std::span<const UtilityFunction* const> utils,
                       std::span<const FrozenPair> pairs, const PenaltyParams& p,
                       double time_unit_s = 1.0);

/// Global argmax of the unfloored utility over the window set; ties go to
/// the earliest time, then the earliest interval. Throws Error when empty.
Projection init_time(const Cue& cue, const WindowSet& windows);

/// Argmax of u over a list of closed ranges; ties to the earliest time.
std::optional<double> argmax_over(const UtilityFunction& u, std::span<const Range> ranges);

struct PgdResult {
    Assignment solution;
    bool converged{};
    int iterations{};
    std::vector<double> trace;      // loss at the start point and after every step
    double step_size{};             // smallest eta used, hours per unit gradient
    double lipschitz{};             // largest L' the step was bounded by
    bool step_bound_held{true};     // eta * L' < 1 on every iteration
    double final_grad_norm{};       // gradient mapping norm at the last iterate, per second
    bool iterates_in_windows{true};
};

/// Projected gradient descent over the given members (cue indices). Times
/// start at each cue's windowed argmax.
PgdResult pgd(std::span<const std::size_t> members, std::span<const Cue> cues,
              std::span<const WindowSet> windows, std::span<const Satellite> sats,
              const PenaltyParams& p, const OptimizerConfig& oc);

/// Zero-tolerance check: every time inside a window of its satellite and
/// every same-satellite pair at least the exact buffer apart.
bool exactly_feasible(const Assignment& a, std::span<const Cue> cues, std::span<const WindowSet> windows,
                      std::span<const Satellite> sats);

struct PrefixEvaluation {
    std::size_t k{};
    bool feasible{};
    bool converged{};
    int iterations{};
    std::vector<double> trace;
};

struct BinarySearchResult {
    std::size_t k_star{};
    Assignment solution;
    std::vector<PrefixEvaluation> evaluations;
    std::optional<PgdResult> best;
};

BinarySearchResult binary_search_prefix(std::span<const std::size_t> ranked, std::span<const Cue> cues,
                                        std::span<const WindowSet> windows, std::span<const Satellite> sats,
                                        const PenaltyParams& p, const OptimizerConfig& oc);

/// Inserts unscheduled cues (in rank order) at the best time that keeps the
/// exact separation to everything already on the same satellite.
/// Returns the number of cues added.
std::size_t refine(Assignment& a, std::span<const std::size_t> ranked, std::span<const Cue> cues,
                   std::span<const WindowSet> windows, std::span<const Satellite> sats, const PenaltyParams& p);

/// Moves each member, in order, to its best time that keeps the exact
/// separation (no margin) to all other members, when that raises its
/// utility. Repeats until nothing moves. Returns the number of moves.
std::size_t tighten(Assignment& a, std::span<const Cue> cues, std::span<const WindowSet> windows,
                    std::span<const Satellite> sats, int max_sweeps = 50);

struct ScheduleResult {
    Schedule schedule;
    std::vector<WindowSet> windows;
    std::vector<std::size_t> ranked;
    std::vector<PrefixEvaluation> evaluations;
    std::size_t feasible_count{};
};

/// Builds the Schedule value (entries ordered by time, then cue id).
Schedule make_schedule(const Assignment& a, std::span<const Cue> cues, std::span<const Satellite> sats,
                       std::size_t from_binary_search);

ScheduleResult schedule_with_windows(std::span<const Cue> cues, std::vector<WindowSet> windows,
                                     std::span<const Satellite> sats, const RankingParams& rp,
                                     const PenaltyParams& pp, const OptimizerConfig& oc);

ScheduleResult schedule(std::span<const Cue> cues, std::span<const Satellite> sats, const RankingParams& rp,
                        const PenaltyParams& pp, const OptimizerConfig& oc, const SamplingConfig& sc);

/// Checks the Schedule invariants against the cues' windows. Throws Error
/// naming the first violation.
void validate_schedule(const Schedule& s, std::span<const Cue> cues, std::span<const WindowSet> windows,
                       std::span<const Satellite> sats);

}  // namespace tipcue
