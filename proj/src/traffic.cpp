#include "cdnsim/traffic.hpp"

namespace cdnsim {

std::vector<ErroneousRequest> generate_attack(Step step, std::int32_t edge_count,
                                              OriginServerId origin, double p_attack,
                                              Step attack_start, RandomStream& rng) {
    std::vector<ErroneousRequest> out;
    if (step < attack_start) return out;
    for (std::int32_t e = 0; e < edge_count; ++e) {
        if (rng.bernoulli(p_attack)) {
            out.push_back(ErroneousRequest{EdgeServerId{e}, origin, step, RequestKind::attack});
        }
    }
    return out;
}

std::vector<ErroneousRequest> generate_honest(Step step, std::int32_t edge_count,
                                              OriginServerId origin, double p_honest,
                                              RandomStream& rng) {
    std::vector<ErroneousRequest> out;
    for (std::int32_t e = 0; e < edge_count; ++e) {
        if (rng.bernoulli(p_honest)) {
            out.push_back(ErroneousRequest{EdgeServerId{e}, origin, step, RequestKind::honest});
        }
    }
    return out;
}

OriginServer::OriginServer(OriginServerId id, std::int32_t edge_count)
    : id_(id),
      last_step_(static_cast<std::size_t>(edge_count), Step{-1}),
      next_sequence_(static_cast<std::size_t>(edge_count), 0) {}

Alert OriginServer::reply(const ErroneousRequest& request) {
    auto e = static_cast<std::size_t>(request.target_edge.index);
    if (last_step_[e] != request.step) {
        last_step_[e] = request.step;
        next_sequence_[e] = 0;
    }
    std::int32_t sequence = next_sequence_[e]++;
    return Alert{request.origin, request.target_edge, request.step, sequence};
}

}  // namespace cdnsim
