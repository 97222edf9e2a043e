#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tipcue/model.hpp"
#include "tipcue/scheduler.hpp"
#include "tipcue/tips.hpp"
#include "tipcue/visibility.hpp"

namespace tipcue {

/// SplitMix64: state += 0x9E3779B97F4A7C15, then the standard xor-shift /
/// multiply finalizer. uniform() takes the top 53 bits.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)

private:
    std::uint64_t state_;
};

/// Independent seed for stream `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct Bounds {
    double lo{};
    double hi{};
};

struct StaticCueSpec {
    std::size_t count{100};
    Bounds side_m{200.0, 800.0};
    Bounds priority{0.05, 0.25};
    Bounds peak{66600.0, 86340.0};  // seconds since epoch
    Bounds sigma_h{0.5, 2.0};
};

struct DynamicCueSpec {
    std::filesystem::path predictions;
    TipScoringParams scoring;
    double decay_per_h{0.2};
    double side_m{200.0};
    double cutoff{66600.0};       // only rows up to this time are scanned
    double track_step_s{600.0};   // dead-reckoned waypoint spacing
};

struct ScenarioSpec {
    std::string epoch{"2024-03-30T00:00:00Z"};
    double horizon_start{66600.0};
    double horizon_end{86340.0};
    Bounds lat{39.8, 41.0};
    Bounds lon{-74.4, -72.5};
    StaticCueSpec statics;
    std::optional<DynamicCueSpec> dynamic;
    FeasibilityConstraints constraints;
    std::vector<Satellite> satellites;
    SamplingConfig sampling;
    RankingParams ranking;
    PenaltyParams penalty;
    OptimizerConfig optimizer;
    std::uint64_t seed{1};
};

void validate(const ScenarioSpec& spec);

/// Reads a scenario document (JSON). Relative file references resolve against
/// the document's directory. Throws ConfigError on any problem.
ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec parse_scenario(const std::string& text, const std::filesystem::path& base_dir);

/// Seconds since the Unix epoch of an ISO-8601 UTC timestamp
/// (YYYY-MM-DDTHH:MM:SS[.fff]Z). Throws ConfigError.
double parse_iso8601(const std::string& s);
/// ISO-8601 UTC with millisecond precision.
std::string format_iso8601(double unix_seconds);

/// Static cues "S001".. with uniform centers, sides, priorities, peaks and
/// widths; cue n draws from derive_seed(seed, n).
std::vector<Cue> generate_static(const ScenarioSpec& spec, std::uint64_t seed);

/// One tip and one moving cue "D1".. per super-threshold prediction row.
std::vector<std::pair<Tip, Cue>> generate_dynamic(const ScenarioSpec& spec);

/// Dynamic cues followed by static cues.
std::vector<Cue> generate_cues(const ScenarioSpec& spec);

struct SweepRow {
    double lambda{};
    std::size_t binary{};
    std::size_t refine{};
    std::size_t total{};
    double u_total{};
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<ScheduleResult> runs;
};

SweepResult run_sweep(const ScenarioSpec& spec, std::span<const double> lambdas);
SweepResult run_sweep(std::span<const Cue> cues, std::span<const WindowSet> windows, const ScenarioSpec& spec,
                      std::span<const double> lambdas);
std::string sweep_csv(const SweepResult& r);

struct OracleResult {
    std::vector<std::size_t> cues;
    std::vector<double> times;
    double utility{};
};

/// Exact optimum over subsets and grid times (start + k * grid_step plus each
/// interval end) of cues observed by one satellite. Throws Error if the total
/// number of grid points exceeds `budget`.
OracleResult brute_force_oracle(std::span<const Cue> cues, std::span<const WindowSet> windows,
                                const Satellite& sat, double grid_step, std::size_t budget = 10'000'000);

/// Discrete greedy: cues in `order`, each placed at its best grid time that
/// keeps exact separation to the cues already placed (earliest on ties).
OracleResult greedy_baseline(std::span<const Cue> cues, std::span<const WindowSet> windows,
                             const Satellite& sat, std::span<const std::size_t> order, double grid_step,
                             std::size_t budget = 10'000'000);

}  // namespace tipcue
