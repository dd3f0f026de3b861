#include "cdnsim/detection.hpp"

namespace cdnsim {

double suspicion_metric(std::size_t distinct_alert_count, std::int32_t edge_count) {
    return static_cast<double>(distinct_alert_count) / static_cast<double>(edge_count);
}

bool threshold_exceeded(double metric, double threshold) { return metric > threshold; }

std::optional<DetectionEvent> evaluate(const AlertLedger& ledger, OriginServerId origin,
                                       Step now, Step window, std::int32_t edge_count,
                                       double threshold) {
    double metric = suspicion_metric(ledger.window_count(origin, now, window), edge_count);
    if (!threshold_exceeded(metric, threshold)) return std::nullopt;
    return DetectionEvent{ledger.owner(), origin, now, metric};
}

}  // namespace cdnsim
