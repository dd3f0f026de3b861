#include "cdnsim/harness.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <system_error>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "cdnsim/engine.hpp"

namespace cdnsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, std::string_view key) {
    T value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        fail_at(line, "invalid value for '" + std::string(key) + "': '" + std::string(token) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view value, std::size_t line, std::string_view key) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::string_view token = comma == std::string_view::npos
                                     ? value.substr(start)
                                     : value.substr(start, comma - start);
        token = trim(token);
        if (token.empty()) {
            fail_at(line, "empty value for '" + std::string(key) + "'");
        }
        out.push_back(parse_number<T>(token, line, key));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_u64(std::uint64_t v) { return std::to_string(v); }
std::string format_i32(std::int32_t v) { return std::to_string(v); }

int resolve_jobs(int jobs) {
#if defined(_OPENMP)
    if (jobs <= 0) return omp_get_max_threads();
    return jobs;
#else
    (void)jobs;
    return 1;
#endif
}

}  // namespace

// ---------------------------------------------------------------------------
// SweepSpec

std::size_t SweepSpec::combo_count() const {
    return edge_counts.size() * durations.size() * windows.size() * gossip_probs.size() *
           thresholds.size() * p_attacks.size() * p_honests.size() * attack_starts.size();
}

std::size_t SweepSpec::run_count() const { return combo_count() * seeds.size(); }

std::vector<SimConfig> SweepSpec::expand() const {
    std::vector<SimConfig> out;
    out.reserve(run_count());
    for (std::int32_t s : edge_counts)
        for (Step d : durations)
            for (Step w : windows)
                for (double g : gossip_probs)
                    for (double t : thresholds)
                        for (double pa : p_attacks)
                            for (double ph : p_honests)
                                for (Step as : attack_starts)
                                    for (std::uint64_t seed : seeds) {
                                        out.push_back(SimConfig{s, d, w, g, t, pa, ph, as, seed});
                                    }
    return out;
}

std::optional<SimConfig> SweepSpec::as_single() const {
    if (run_count() != 1) return std::nullopt;
    return SimConfig{edge_counts[0], durations[0], windows[0],      gossip_probs[0],
                     thresholds[0],  p_attacks[0], p_honests[0],    attack_starts[0],
                     seeds[0]};
}

// ---------------------------------------------------------------------------
// Config text format

SweepSpec parse_config(const std::string& text) {
    SweepSpec spec;
    std::set<std::string> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string::npos
                                    ? std::string_view(text).substr(pos)
                                    : std::string_view(text).substr(pos, eol - pos);
        ++line_no;

        if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                fail_at(line_no, "expected key=value");
            }
            std::string key{trim(line.substr(0, eq))};
            std::string_view value = trim(line.substr(eq + 1));
            if (key.empty()) fail_at(line_no, "missing key");
            if (!seen.insert(key).second) fail_at(line_no, "duplicate key '" + key + "'");

            if (key == "edge_count") {
                spec.edge_counts = parse_list<std::int32_t>(value, line_no, key);
            } else if (key == "duration") {
                spec.durations = parse_list<Step>(value, line_no, key);
            } else if (key == "window") {
                spec.windows = parse_list<Step>(value, line_no, key);
            } else if (key == "gossip_prob") {
                spec.gossip_probs = parse_list<double>(value, line_no, key);
            } else if (key == "threshold") {
                spec.thresholds = parse_list<double>(value, line_no, key);
            } else if (key == "p_attack") {
                spec.p_attacks = parse_list<double>(value, line_no, key);
            } else if (key == "p_honest") {
                spec.p_honests = parse_list<double>(value, line_no, key);
            } else if (key == "attack_start") {
                spec.attack_starts = parse_list<Step>(value, line_no, key);
            } else if (key == "seed") {
                spec.seeds = parse_list<std::uint64_t>(value, line_no, key);
            } else {
                fail_at(line_no, "unknown key '" + key + "'");
            }
        }

        if (eol == std::string::npos) break;
        pos = eol + 1;
    }
    return spec;
}

std::string render_config(const SimConfig& config) {
    std::string out;
    out += "edge_count=" + format_i32(config.edge_count) + "\n";
    out += "duration=" + format_i32(config.duration) + "\n";
    out += "window=" + format_i32(config.window) + "\n";
    out += "gossip_prob=" + format_real(config.gossip_prob) + "\n";
    out += "threshold=" + format_real(config.threshold) + "\n";
    out += "p_attack=" + format_real(config.p_attack) + "\n";
    out += "p_honest=" + format_real(config.p_honest) + "\n";
    out += "attack_start=" + format_i32(config.attack_start) + "\n";
    out += "seed=" + format_u64(config.seed) + "\n";
    return out;
}

SweepSpec preset(const std::string& name) {
    auto tenths = [](int from, int to) {
        std::vector<double> out;
        for (int i = from; i <= to; ++i) out.push_back(i / 10.0);
        return out;
    };
    auto hundredths = [](int from, int to) {
        std::vector<double> out;
        for (int i = from; i <= to; ++i) out.push_back(i / 100.0);
        return out;
    };
    auto quarter_grid = [] {
        return std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
    };

    SweepSpec spec;
    if (name == "fig2") {
        spec.edge_counts = {10, 25, 50, 75};
        spec.p_attacks = tenths(1, 10);
        spec.thresholds = {0.5};
    } else if (name == "fig3") {
        spec.edge_counts = {75};
        spec.thresholds = quarter_grid();
        spec.p_attacks = tenths(1, 10);
    } else if (name == "false_positive") {
        spec.edge_counts = {10, 25, 50, 75};
        spec.thresholds = quarter_grid();
        spec.p_attacks = {0.0};
        spec.p_honests = hundredths(1, 5);
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Sweep execution

std::vector<AggregateRow> aggregate_runs(const std::vector<SimConfig>& configs,
                                         const std::vector<RunMetrics>& metrics,
                                         std::size_t seeds_per_config) {
    if (configs.size() != metrics.size()) {
        throw std::invalid_argument("configs and metrics differ in length");
    }
    if (seeds_per_config == 0 || configs.size() % seeds_per_config != 0) {
        throw std::invalid_argument("run count is not a multiple of the seed count");
    }

    std::vector<AggregateRow> rows;
    rows.reserve(configs.size() / seeds_per_config);
    for (std::size_t base = 0; base < configs.size(); base += seeds_per_config) {
        AggregateRow row;
        row.base = configs[base];
        row.runs = static_cast<std::int32_t>(seeds_per_config);

        std::size_t detected = 0;
        double step_sum = 0.0;
        double message_sum = 0.0;
        for (std::size_t i = base; i < base + seeds_per_config; ++i) {
            const RunMetrics& m = metrics[i];
            if (m.detected) {
                ++detected;
                step_sum += static_cast<double>(*m.detection_step);
            }
            message_sum += static_cast<double>(m.gossip_messages_sent);
        }
        row.detection_rate_pct =
            100.0 * static_cast<double>(detected) / static_cast<double>(seeds_per_config);
        if (detected > 0) {
            row.mean_detection_step = step_sum / static_cast<double>(detected);
        }
        row.mean_messages = message_sum / static_cast<double>(seeds_per_config);
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepResult sweep(const SweepSpec& spec, int jobs) {
    if (spec.seeds.empty()) throw std::invalid_argument("seed list is empty");
    if (spec.combo_count() == 0) throw std::invalid_argument("empty parameter product");

    SweepResult result;
    result.configs = spec.expand();
    for (const SimConfig& config : result.configs) validate(config);

    const auto n = static_cast<std::int64_t>(result.configs.size());
    result.metrics.resize(result.configs.size());

    std::string first_error;
    const auto seeds_per_config = static_cast<std::int64_t>(spec.seeds.size());
    auto run_one = [&result, seeds_per_config](std::int64_t i) {
        const SimConfig& config = result.configs[static_cast<std::size_t>(i)];
        try {
            result.metrics[static_cast<std::size_t>(i)] = run(config);
            return std::string{};
        } catch (const std::exception& e) {
            return "run " + std::to_string(i) + " (configuration " +
                   std::to_string(i / seeds_per_config) + ", seed " +
                   std::to_string(config.seed) + "): " + e.what();
        }
    };

    int workers = resolve_jobs(jobs);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n && first_error.empty(); ++i) {
            first_error = run_one(i);
        }
    } else {
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (std::int64_t i = 0; i < n; ++i) {
            std::string error = run_one(i);
            if (!error.empty()) {
#pragma omp critical
                if (first_error.empty()) first_error = std::move(error);
            }
        }
#else
        for (std::int64_t i = 0; i < n && first_error.empty(); ++i) {
            first_error = run_one(i);
        }
#endif
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);

    result.aggregates = aggregate_runs(result.configs, result.metrics, spec.seeds.size());
    return result;
}

// ---------------------------------------------------------------------------
// CSV output

std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("failed to format real value");
    return std::string(buf, ptr);
}

namespace {

void append_config_fields(std::string& out, const SimConfig& c) {
    out += format_i32(c.edge_count);
    out += ',';
    out += format_i32(c.duration);
    out += ',';
    out += format_i32(c.window);
    out += ',';
    out += format_real(c.gossip_prob);
    out += ',';
    out += format_real(c.threshold);
    out += ',';
    out += format_real(c.p_attack);
    out += ',';
    out += format_real(c.p_honest);
}

}  // namespace

std::string raw_csv(const std::vector<SimConfig>& configs,
                    const std::vector<RunMetrics>& metrics) {
    if (configs.size() != metrics.size()) {
        throw std::invalid_argument("configs and metrics differ in length");
    }
    std::string out{kRawCsvHeader};
    out += '\n';
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const SimConfig& c = configs[i];
        const RunMetrics& m = metrics[i];
        append_config_fields(out, c);
        out += ',';
        out += format_u64(c.seed);
        out += ',';
        out += m.detected ? "true" : "false";
        out += ',';
        if (m.detection_step) out += format_i32(*m.detection_step);
        out += ',';
        out += format_u64(m.gossip_messages_sent);
        out += ',';
        out += format_u64(m.alerts_generated);
        out += '\n';
    }
    return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out{kAggregateCsvHeader};
    out += '\n';
    for (const AggregateRow& row : rows) {
        append_config_fields(out, row.base);
        out += ',';
        out += format_i32(row.runs);
        out += ',';
        out += format_real(row.detection_rate_pct);
        out += ',';
        if (row.mean_detection_step) out += format_real(*row.mean_detection_step);
        out += ',';
        out += format_real(row.mean_messages);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    file.flush();
    if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace cdnsim
