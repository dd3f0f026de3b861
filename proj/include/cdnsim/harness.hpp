#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdnsim/types.hpp"

namespace cdnsim {

// A grid of parameter values to sweep. Every SimConfig field may carry
// several values; runs are the cartesian product with fields varying in
// declaration order and the seed innermost.
struct SweepSpec {
    std::vector<std::int32_t> edge_counts{75};
    std::vector<Step> durations{200};
    std::vector<Step> windows{10};
    std::vector<double> gossip_probs{0.5};
    std::vector<double> thresholds{0.5};
    std::vector<double> p_attacks{0.5};
    std::vector<double> p_honests{0.01};
    std::vector<Step> attack_starts{0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};

    std::size_t combo_count() const;  // configurations, seeds excluded
    std::size_t run_count() const;    // combo_count() * seeds
    std::vector<SimConfig> expand() const;

    // The single configuration this spec denotes, when every list
    // (including seeds) holds exactly one value.
    std::optional<SimConfig> as_single() const;
};

// Parses the line-based `key=value` format. Lists are comma-separated,
// `#` starts a comment, unknown or duplicated keys and malformed values
// are rejected with line-numbered diagnostics (std::runtime_error).
SweepSpec parse_config(const std::string& text);

// Renders one configuration in the same format; parse_config(render_config(c))
// recovers c exactly.
std::string render_config(const SimConfig& config);

// Built-in experiment grids: "fig2", "fig3", or "false_positive".
SweepSpec preset(const std::string& name);

// Per-configuration summary over that configuration's seeds.
struct AggregateRow {
    SimConfig base;  // seed field is meaningless here
    std::int32_t runs = 0;
    double detection_rate_pct = 0.0;
    std::optional<double> mean_detection_step;  // over detected runs only
    double mean_messages = 0.0;
};

struct SweepResult {
    std::vector<SimConfig> configs;   // per run, product order
    std::vector<RunMetrics> metrics;  // parallel to configs
    std::vector<AggregateRow> aggregates;
};

// Executes every (configuration x seed) run. jobs == 1 is the serial
// reference path; jobs <= 0 uses all available threads; otherwise `jobs`
// workers. Results are merged in product order, so the output is identical
// whatever the parallelism.
SweepResult sweep(const SweepSpec& spec, int jobs = 0);

std::vector<AggregateRow> aggregate_runs(const std::vector<SimConfig>& configs,
                                         const std::vector<RunMetrics>& metrics,
                                         std::size_t seeds_per_config);

// Shortest decimal form that parses back to exactly the same double.
std::string format_real(double value);

inline constexpr std::string_view kRawCsvHeader =
    "edge_count,duration,window,gossip_prob,threshold,p_attack,p_honest,seed,"
    "detected,detection_step,gossip_messages_sent,alerts_generated";

inline constexpr std::string_view kAggregateCsvHeader =
    "edge_count,duration,window,gossip_prob,threshold,p_attack,p_honest,runs,"
    "detection_rate_pct,mean_detection_step,mean_messages";

std::string raw_csv(const std::vector<SimConfig>& configs,
                    const std::vector<RunMetrics>& metrics);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

// Writes `content` to `path`, failing with a diagnostic that names the path.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace cdnsim
