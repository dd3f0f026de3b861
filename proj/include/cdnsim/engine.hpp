#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cdnsim/detection.hpp"
#include "cdnsim/gossip.hpp"
#include "cdnsim/rng.hpp"
#include "cdnsim/traffic.hpp"
#include "cdnsim/types.hpp"

namespace cdnsim {

// An erroneous request injected at a fixed (step, edge) instead of being
// drawn from the random traffic processes. Used by tests to script exact
// scenarios; injections consume no random draws.
struct ScriptedRequest {
    Step step = 0;
    EdgeServerId target_edge;
};

// Deterministic time-stepped executor for one run.
//
// Each step runs six phases in fixed order:
//   1. deliver the gossip messages sent last step into recipient ledgers,
//   2. generate attack requests, then honest requests,
//   3. origin replies: alerts are recorded at their reporters in the same
//      step and arm the reporter's gossip trigger,
//   4. each edge in ascending id order prunes its ledger, picks a trigger
//      origin, and gossips; messages are staged for delivery next step,
//   5. each edge in ascending id order evaluates detection,
//   6. the step counter advances.
//
// A single RandomStream is consumed in that phase/edge order, so equal
// seeds give equal trajectories. The run continues to the configured
// duration even after a detection; metrics record only the first event.
class Simulation {
public:
    explicit Simulation(const SimConfig& config, std::vector<ScriptedRequest> script = {});

    void step_once();
    void run_to_end();
    bool done() const { return step_ >= config_.duration; }

    RunMetrics metrics() const;

    // Introspection, primarily for tests and oracles.
    Step now() const { return step_; }  // next step to execute
    const SimConfig& config() const { return config_; }
    OriginServerId origin() const { return origin_; }
    const EdgeState& edge(std::int32_t index) const {
        return edges_[static_cast<std::size_t>(index)];
    }
    const std::optional<DetectionEvent>& first_detection() const { return first_detection_; }
    const std::vector<DetectionEvent>& last_step_detections() const { return step_detections_; }
    std::size_t in_flight_count() const { return in_flight_.size(); }
    std::uint64_t gossip_messages_sent() const { return gossip_messages_sent_; }
    std::uint64_t alerts_generated() const { return alerts_generated_; }

private:
    void deliver_request(const ErroneousRequest& request);

    SimConfig config_;
    OriginServerId origin_{0};
    std::vector<EdgeState> edges_;
    OriginServer origin_server_;
    RandomStream rng_;
    std::vector<ScriptedRequest> script_;  // sorted by step, stable
    std::size_t script_next_ = 0;

    Step step_ = 0;
    std::vector<std::pair<EdgeServerId, GossipMessage>> in_flight_;  // due next step
    std::vector<DetectionEvent> step_detections_;
    std::optional<DetectionEvent> first_detection_;
    std::uint64_t gossip_messages_sent_ = 0;
    std::uint64_t alerts_generated_ = 0;
};

// Validates `config`, executes the full run, and reports its metrics.
RunMetrics run(const SimConfig& config);

}  // namespace cdnsim
