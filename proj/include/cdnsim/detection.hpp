#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "cdnsim/gossip.hpp"
#include "cdnsim/types.hpp"

namespace cdnsim {

// Raised when an edge server's suspicion metric for one origin strictly
// exceeds the run's threshold.
struct DetectionEvent {
    EdgeServerId detector;
    OriginServerId origin;
    Step step = 0;
    double metric_value = 0.0;

    bool operator==(const DetectionEvent&) const = default;
};

// Distinct in-window alert count for one origin averaged over the CDN size:
// an estimate of erroneous query strings received per edge server during
// the window.
double suspicion_metric(std::size_t distinct_alert_count, std::int32_t edge_count);

// Strictly above: a metric exactly at the threshold does not trigger.
bool threshold_exceeded(double metric, double threshold);

// Evaluates one edge server's view of `origin` at `now`. Returns an event
// when the in-window count pushes the metric past the threshold.
std::optional<DetectionEvent> evaluate(const AlertLedger& ledger, OriginServerId origin,
                                       Step now, Step window, std::int32_t edge_count,
                                       double threshold);

}  // namespace cdnsim
