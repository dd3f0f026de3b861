#pragma once

#include <cstdint>
#include <vector>

#include "cdnsim/rng.hpp"
#include "cdnsim/types.hpp"

namespace cdnsim {

enum class RequestKind { attack, honest };

// A request whose query string the origin server will reject. The kind is
// bookkeeping for the generators only; it is dropped when the origin
// replies, so alerts never reveal whether a request was malicious.
struct ErroneousRequest {
    EdgeServerId target_edge;
    OriginServerId origin;
    Step step = 0;
    RequestKind kind = RequestKind::honest;
};

// Attacker process: from attack_start on, each edge server independently
// receives one attack request per step with probability p_attack. One draw
// is consumed per edge in ascending id order; before attack_start no draws
// are consumed and the result is empty.
std::vector<ErroneousRequest> generate_attack(Step step, std::int32_t edge_count,
                                              OriginServerId origin, double p_attack,
                                              Step attack_start, RandomStream& rng);

// Background noise: each edge server independently receives one honest
// erroneous request per step with probability p_honest, every step of the
// run. One draw per edge, ascending id order.
std::vector<ErroneousRequest> generate_honest(Step step, std::int32_t edge_count,
                                              OriginServerId origin, double p_honest,
                                              RandomStream& rng);

// Origin server behaviour: reply to each erroneous request with an alert
// back to the requesting edge. The resource transfer itself is not modeled.
//
// Sequence numbers restart at zero for each (reporter, step), keeping
// (origin, reporter, step, sequence) unique without unbounded counters.
class OriginServer {
public:
    OriginServer(OriginServerId id, std::int32_t edge_count);

    OriginServerId id() const { return id_; }

    Alert reply(const ErroneousRequest& request);

private:
    OriginServerId id_;
    std::vector<Step> last_step_;           // per reporter
    std::vector<std::int32_t> next_sequence_;  // per reporter, for last_step_
};

}  // namespace cdnsim
