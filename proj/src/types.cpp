#include "cdnsim/types.hpp"

#include <stdexcept>

namespace cdnsim {

const SimConfig& validate(const SimConfig& config) {
    if (config.edge_count < 1) {
        throw std::invalid_argument("edge_count must be >= 1");
    }
    if (config.duration < 1) {
        throw std::invalid_argument("duration must be >= 1");
    }
    if (config.window < 1) {
        throw std::invalid_argument("window must be >= 1");
    }
    if (config.window > config.duration) {
        throw std::invalid_argument("window exceeds duration");
    }
    if (!(config.gossip_prob >= 0.0 && config.gossip_prob <= 1.0)) {
        throw std::invalid_argument("gossip_prob must be in [0,1]");
    }
    if (!(config.threshold > 0.0)) {
        throw std::invalid_argument("threshold must be > 0");
    }
    if (!(config.p_attack >= 0.0 && config.p_attack <= 1.0)) {
        throw std::invalid_argument("p_attack must be in [0,1]");
    }
    if (!(config.p_honest >= 0.0 && config.p_honest <= 1.0)) {
        throw std::invalid_argument("p_honest must be in [0,1]");
    }
    if (config.attack_start < 0) {
        throw std::invalid_argument("attack_start must be >= 0");
    }
    return config;
}

}  // namespace cdnsim
