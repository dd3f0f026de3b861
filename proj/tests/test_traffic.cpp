#include <doctest.h>

#include <cmath>
#include <cstddef>

#include "cdnsim/rng.hpp"
#include "cdnsim/traffic.hpp"

using namespace cdnsim;

namespace {
const OriginServerId kOrigin{0};
}

TEST_CASE("attack generator: degenerate probabilities") {
    RandomStream rng(1);
    for (Step s = 0; s < 20; ++s) {
        CHECK(generate_attack(s, 10, kOrigin, 0.0, 0, rng).empty());
    }
    for (Step s = 0; s < 20; ++s) {
        auto requests = generate_attack(s, 10, kOrigin, 1.0, 0, rng);
        CHECK(requests.size() == 10);
        for (std::size_t i = 0; i < requests.size(); ++i) {
            CHECK(requests[i].target_edge == EdgeServerId{static_cast<std::int32_t>(i)});
            CHECK(requests[i].step == s);
            CHECK(requests[i].kind == RequestKind::attack);
        }
    }
}

TEST_CASE("no attack traffic and no draws before attack_start") {
    RandomStream rng(42);
    CHECK(generate_attack(4, 10, kOrigin, 1.0, 5, rng).empty());

    RandomStream reference(42);
    CHECK(rng.next_unit() == reference.next_unit());

    RandomStream rng2(42);
    CHECK(generate_attack(5, 10, kOrigin, 1.0, 5, rng2).size() == 10);
}

TEST_CASE("attack generator matches the binomial mean") {
    RandomStream rng(7);
    const int steps = 10000;
    const std::int32_t edges = 75;
    const double p = 0.5;

    double total = 0.0;
    for (Step s = 0; s < steps; ++s) {
        total += static_cast<double>(generate_attack(s, edges, kOrigin, p, 0, rng).size());
    }
    double mean = total / steps;

    double expected = p * edges;  // 37.5
    double tolerance = 3.0 * std::sqrt(edges * p * (1.0 - p)) / std::sqrt(double(steps));
    CHECK(std::abs(mean - expected) <= tolerance);
}

TEST_CASE("honest generator: degenerate and calibrated rates") {
    RandomStream rng(3);
    for (Step s = 0; s < 20; ++s) {
        CHECK(generate_honest(s, 10, kOrigin, 0.0, rng).empty());
    }

    // expected total over a typical run: 200 steps x 75 edges x 0.01 = 150
    std::size_t total = 0;
    for (Step s = 0; s < 200; ++s) {
        total += generate_honest(s, 75, kOrigin, 0.01, rng).size();
    }
    double sigma = std::sqrt(15000 * 0.01 * 0.99);  // ~12.2
    CHECK(std::abs(static_cast<double>(total) - 150.0) <= 3.0 * sigma);
}

TEST_CASE("honest generator at the stress rate") {
    RandomStream rng(9);
    const int steps = 10000;
    double total = 0.0;
    for (Step s = 0; s < steps; ++s) {
        total += static_cast<double>(generate_honest(s, 75, kOrigin, 0.05, rng).size());
    }
    double mean = total / steps;
    double expected = 0.05 * 75;  // 3.75 per step
    double tolerance = 3.0 * std::sqrt(75 * 0.05 * 0.95) / std::sqrt(double(steps));
    CHECK(std::abs(mean - expected) <= tolerance);
}

TEST_CASE("origin replies map request fields onto the alert") {
    OriginServer origin(kOrigin, 10);
    Alert alert = origin.reply(ErroneousRequest{EdgeServerId{3}, kOrigin, 7, RequestKind::attack});
    CHECK(alert == Alert{kOrigin, EdgeServerId{3}, 7, 0});
}

TEST_CASE("origin replies number same-step repeats sequentially") {
    OriginServer origin(kOrigin, 10);
    ErroneousRequest request{EdgeServerId{3}, kOrigin, 7, RequestKind::honest};
    CHECK(origin.reply(request).sequence == 0);
    CHECK(origin.reply(request).sequence == 1);
    CHECK(origin.reply(request).sequence == 2);

    // a new step restarts the reporter's counter
    request.step = 8;
    CHECK(origin.reply(request).sequence == 0);

    // other reporters are unaffected
    CHECK(origin.reply(ErroneousRequest{EdgeServerId{4}, kOrigin, 8, RequestKind::honest})
              .sequence == 0);
}

TEST_CASE("attack and honest requests produce indistinguishable alerts") {
    OriginServer origin(kOrigin, 10);
    Alert from_attack =
        origin.reply(ErroneousRequest{EdgeServerId{1}, kOrigin, 3, RequestKind::attack});
    Alert from_honest =
        origin.reply(ErroneousRequest{EdgeServerId{2}, kOrigin, 3, RequestKind::honest});

    // the alert type carries origin, reporter, step, sequence - nothing else,
    // so only the reporter distinguishes these two
    from_honest.reporter = EdgeServerId{1};
    CHECK(from_attack == from_honest);
}
