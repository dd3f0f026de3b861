#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>

namespace cdnsim {

using Step = std::int32_t;

struct EdgeServerId {
    std::int32_t index = 0;
    auto operator<=>(const EdgeServerId&) const = default;
};

struct OriginServerId {
    std::int32_t index = 0;
    auto operator<=>(const OriginServerId&) const = default;
};

// One report that `reporter` received an erroneous query string aimed at
// `origin` during `step`. `sequence` distinguishes multiple reports by the
// same edge within the same step, so an alert is a unique event, not a flag.
struct Alert {
    OriginServerId origin;
    EdgeServerId reporter;
    Step step = 0;
    std::int32_t sequence = 0;
    auto operator<=>(const Alert&) const = default;
};

// Full parameterization of one simulation run.
//
// Probabilities are per edge server and per time step. `window` is the
// trailing interval (now - window, now] over which alerts are retained;
// `threshold` is the value the suspicion metric must strictly exceed.
struct SimConfig {
    std::int32_t edge_count = 75;
    Step duration = 200;
    Step window = 10;
    double gossip_prob = 0.5;
    double threshold = 0.5;
    double p_attack = 0.5;
    double p_honest = 0.01;
    Step attack_start = 0;
    std::uint64_t seed = 1;

    bool operator==(const SimConfig&) const = default;
};

// Returns `config` unchanged if every bound holds, otherwise throws
// std::invalid_argument with a diagnostic naming the offending field.
const SimConfig& validate(const SimConfig& config);

// Outcome of one run. `detection_step` is measured relative to
// `attack_start` and is present exactly when `detected` is true.
struct RunMetrics {
    bool detected = false;
    std::optional<Step> detection_step;
    std::optional<EdgeServerId> first_detector;
    std::uint64_t gossip_messages_sent = 0;
    std::uint64_t alerts_generated = 0;
    bool false_positive = false;

    bool operator==(const RunMetrics&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, EdgeServerId id) {
    return os << "es_" << id.index;
}

inline std::ostream& operator<<(std::ostream& os, OriginServerId id) {
    return os << "os_" << id.index;
}

inline std::ostream& operator<<(std::ostream& os, const Alert& a) {
    return os << "Alert(" << a.origin << ", " << a.reporter << ", step " << a.step
              << ", seq " << a.sequence << ")";
}

}  // namespace cdnsim

template <>
struct std::hash<cdnsim::EdgeServerId> {
    std::size_t operator()(cdnsim::EdgeServerId id) const noexcept {
        return std::hash<std::int32_t>{}(id.index);
    }
};

template <>
struct std::hash<cdnsim::OriginServerId> {
    std::size_t operator()(cdnsim::OriginServerId id) const noexcept {
        return std::hash<std::int32_t>{}(id.index);
    }
};

template <>
struct std::hash<cdnsim::Alert> {
    std::size_t operator()(const cdnsim::Alert& a) const noexcept {
        // splitmix64-style mixing of the four fields
        std::uint64_t h = static_cast<std::uint32_t>(a.origin.index);
        auto mix = [](std::uint64_t x) {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        };
        h = mix(h ^ static_cast<std::uint32_t>(a.reporter.index));
        h = mix(h ^ static_cast<std::uint32_t>(a.step));
        h = mix(h ^ static_cast<std::uint32_t>(a.sequence));
        return static_cast<std::size_t>(h);
    }
};
