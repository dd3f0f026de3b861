#include "cdnsim/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace cdnsim {

Simulation::Simulation(const SimConfig& config, std::vector<ScriptedRequest> script)
    : config_(config),
      origin_server_(origin_, config.edge_count),
      rng_(config.seed),
      script_(std::move(script)) {
    edges_.reserve(static_cast<std::size_t>(config_.edge_count));
    for (std::int32_t i = 0; i < config_.edge_count; ++i) {
        edges_.emplace_back(EdgeServerId{i}, config_.edge_count);
    }
    std::stable_sort(script_.begin(), script_.end(),
                     [](const ScriptedRequest& a, const ScriptedRequest& b) {
                         return a.step < b.step;
                     });
}

void Simulation::deliver_request(const ErroneousRequest& request) {
    Alert alert = origin_server_.reply(request);
    auto& edge = edges_[static_cast<std::size_t>(request.target_edge.index)];
    edge.ledger.record(alert);
    edge.pending_alert = alert;
    ++alerts_generated_;
}

void Simulation::step_once() {
    if (done()) throw std::logic_error("step past configured duration");
    const Step now = step_;

    // 1. deliver gossip sent last step
    for (const auto& [recipient, message] : in_flight_) {
        edges_[static_cast<std::size_t>(recipient.index)].ledger.merge(message);
    }
    in_flight_.clear();

    // 2+3. traffic, then origin replies recorded at the reporters
    for (const auto& request :
         generate_attack(now, config_.edge_count, origin_, config_.p_attack,
                         config_.attack_start, rng_)) {
        deliver_request(request);
    }
    for (const auto& request :
         generate_honest(now, config_.edge_count, origin_, config_.p_honest, rng_)) {
        deliver_request(request);
    }
    for (; script_next_ < script_.size() && script_[script_next_].step == now; ++script_next_) {
        deliver_request(ErroneousRequest{script_[script_next_].target_edge, origin_, now,
                                         RequestKind::honest});
    }

    // 4. gossip opportunity per edge, ascending id; sends arrive next step
    for (auto& edge : edges_) {
        edge.ledger.prune(now, config_.window);
        if (auto trigger = choose_trigger_origin(edge, now, config_.window, rng_)) {
            auto sends = gossip_round(edge, *trigger, now, config_.window,
                                      config_.gossip_prob, rng_);
            gossip_messages_sent_ += sends.size();
            std::move(sends.begin(), sends.end(), std::back_inserter(in_flight_));
        }
        edge.pending_alert.reset();
    }

    // 5. detection, ascending id; same-step local alerts count
    step_detections_.clear();
    for (const auto& edge : edges_) {
        for (std::size_t i = 0; i < edge.ledger.origin_count(); ++i) {
            auto event = evaluate(edge.ledger, edge.ledger.origin_at(i), now, config_.window,
                                  config_.edge_count, config_.threshold);
            if (event) {
                step_detections_.push_back(*event);
                if (!first_detection_) first_detection_ = *event;
            }
        }
    }

    // 6. advance
    ++step_;
}

void Simulation::run_to_end() {
    while (!done()) step_once();
}

RunMetrics Simulation::metrics() const {
    RunMetrics m;
    m.detected = first_detection_.has_value();
    if (first_detection_) {
        m.detection_step = first_detection_->step - config_.attack_start;
        m.first_detector = first_detection_->detector;
    }
    m.gossip_messages_sent = gossip_messages_sent_;
    m.alerts_generated = alerts_generated_;
    m.false_positive = m.detected && config_.p_attack == 0.0;
    return m;
}

RunMetrics run(const SimConfig& config) {
    Simulation sim(validate(config));
    sim.run_to_end();
    return sim.metrics();
}

}  // namespace cdnsim
