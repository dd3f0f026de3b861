#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "cdnsim/gossip.hpp"
#include "cdnsim/rng.hpp"
#include "cdnsim/types.hpp"

using namespace cdnsim;

namespace {

const OriginServerId kOrigin{0};

Alert make_alert(std::int32_t reporter, Step step, std::int32_t seq = 0,
                 OriginServerId origin = kOrigin) {
    return Alert{origin, EdgeServerId{reporter}, step, seq};
}

std::set<Alert> as_set(const std::vector<Alert>& alerts) {
    return std::set<Alert>(alerts.begin(), alerts.end());
}

GossipMessage message_of(EdgeServerId sender, const std::vector<Alert>& alerts, Step now,
                         Step window) {
    AlertLedger staging(sender);
    for (const Alert& a : alerts) staging.record(a);
    return build_message(staging, alerts.empty() ? kOrigin : alerts.front().origin, now, window);
}

}  // namespace

TEST_CASE("choose_probability returns the configured constant") {
    SimConfig config;
    config.gossip_prob = 0.5;
    CHECK(choose_probability(config) == 0.5);
    config.gossip_prob = 0.9;
    CHECK(choose_probability(config) == 0.9);
    config.gossip_prob = 0.0;
    CHECK(choose_probability(config) == 0.0);
}

TEST_CASE("record is idempotent per alert") {
    AlertLedger ledger(EdgeServerId{0});
    Alert a = make_alert(3, 7);
    CHECK(ledger.record(a));
    CHECK_FALSE(ledger.record(a));
    CHECK(ledger.total_alerts() == 1);
    CHECK(ledger.contains(a));
}

TEST_CASE("alerts differing only in sequence are distinct") {
    AlertLedger ledger(EdgeServerId{0});
    CHECK(ledger.record(make_alert(3, 7, 0)));
    CHECK(ledger.record(make_alert(3, 7, 1)));
    CHECK(ledger.total_alerts() == 2);
}

TEST_CASE("large sequence numbers take the overflow path and still deduplicate") {
    AlertLedger ledger(EdgeServerId{0});
    for (std::int32_t seq : {0, 1, 2, 7}) CHECK(ledger.record(make_alert(5, 3, seq)));
    CHECK_FALSE(ledger.record(make_alert(5, 3, 7)));
    CHECK(ledger.total_alerts() == 4);
    for (std::int32_t seq : {0, 1, 2, 7}) CHECK(ledger.contains(make_alert(5, 3, seq)));
    CHECK_FALSE(ledger.contains(make_alert(5, 3, 3)));

    auto listed = ledger.alerts(kOrigin);
    CHECK(listed.size() == 4);
    CHECK(std::is_sorted(listed.begin(), listed.end()));
}

TEST_CASE("enumeration interleaves bitmap and overflow entries by reporter") {
    AlertLedger ledger(EdgeServerId{0});
    ledger.record(make_alert(7, 3, 0));  // bitmap, high reporter
    ledger.record(make_alert(2, 3, 5));  // overflow, low reporter
    ledger.record(make_alert(2, 3, 1));  // bitmap, same reporter as the overflow entry
    ledger.record(make_alert(9, 3, 4));  // overflow, highest reporter

    auto listed = ledger.alerts(kOrigin);
    std::vector<Alert> expected = {make_alert(2, 3, 1), make_alert(2, 3, 5), make_alert(7, 3, 0),
                                   make_alert(9, 3, 4)};
    CHECK(listed == expected);
}

TEST_CASE("merging a message grows the ledger by the unknown alerts only") {
    // oracle: plain set union over explicit small sets
    std::vector<Alert> incoming = {make_alert(1, 4), make_alert(2, 4), make_alert(3, 5),
                                   make_alert(4, 5), make_alert(5, 6)};
    std::vector<Alert> known = {make_alert(2, 4), make_alert(4, 5)};

    std::set<Alert> expected(known.begin(), known.end());
    expected.insert(incoming.begin(), incoming.end());

    AlertLedger ledger(EdgeServerId{0});
    for (const Alert& a : known) ledger.record(a);
    ledger.merge(message_of(EdgeServerId{9}, incoming, 6, 10));

    CHECK(ledger.total_alerts() == expected.size());
    CHECK(ledger.total_alerts() == known.size() + 3);
    CHECK(as_set(ledger.alerts(kOrigin)) == expected);
}

TEST_CASE("idempotent merge: ledger size equals the distinct-alert count") {
    RandomStream rng(20240);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Alert> multiset;
        std::size_t draws = 1 + rng.uniform_index(100);
        for (std::size_t i = 0; i < draws; ++i) {
            multiset.push_back(make_alert(static_cast<std::int32_t>(rng.uniform_index(6)),
                                          static_cast<Step>(rng.uniform_index(20)),
                                          static_cast<std::int32_t>(rng.uniform_index(4))));
        }

        AlertLedger ledger(EdgeServerId{0});
        for (const Alert& a : multiset) ledger.record(a);

        std::set<Alert> distinct(multiset.begin(), multiset.end());
        CHECK(ledger.total_alerts() == distinct.size());
        CHECK(as_set(ledger.alerts(kOrigin)) == distinct);
    }
}

TEST_CASE("prune keeps the half-open window (now - window, now]") {
    AlertLedger ledger(EdgeServerId{0});
    ledger.record(make_alert(0, 5));
    ledger.record(make_alert(1, 14));
    ledger.record(make_alert(2, 15));

    std::size_t removed = ledger.prune(15, 10);
    CHECK(removed == 1);
    CHECK(ledger.total_alerts() == 2);
    CHECK_FALSE(ledger.contains(make_alert(0, 5)));
    CHECK(ledger.contains(make_alert(1, 14)));
    CHECK(ledger.contains(make_alert(2, 15)));
}

TEST_CASE("a window covering full history removes nothing") {
    AlertLedger ledger(EdgeServerId{0});
    for (Step s : {0, 3, 9}) ledger.record(make_alert(1, s));
    CHECK(ledger.prune(9, 10) == 0);
    CHECK(ledger.total_alerts() == 3);
}

TEST_CASE("prune matches a brute-force filter on random alerts") {
    RandomStream rng(77);
    std::vector<Alert> alerts;
    for (int i = 0; i < 100; ++i) {
        alerts.push_back(make_alert(static_cast<std::int32_t>(rng.uniform_index(10)),
                                    static_cast<Step>(rng.uniform_index(201)),
                                    static_cast<std::int32_t>(rng.uniform_index(3))));
    }

    AlertLedger ledger(EdgeServerId{0});
    for (const Alert& a : alerts) ledger.record(a);
    std::size_t before = ledger.total_alerts();
    std::size_t removed = ledger.prune(200, 10);

    std::set<Alert> expected;
    for (const Alert& a : alerts) {
        if (a.step > 190) expected.insert(a);
    }
    CHECK(as_set(ledger.alerts(kOrigin)) == expected);
    CHECK(before - removed == expected.size());
}

TEST_CASE("window soundness: after prune every stored alert is younger than the window") {
    RandomStream rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        AlertLedger ledger(EdgeServerId{0});
        for (int i = 0; i < 60; ++i) {
            ledger.record(make_alert(static_cast<std::int32_t>(rng.uniform_index(8)),
                                     static_cast<Step>(rng.uniform_index(50))));
        }
        Step now = 49;
        Step window = static_cast<Step>(1 + rng.uniform_index(20));
        ledger.prune(now, window);
        for (const Alert& a : ledger.alerts(kOrigin)) CHECK(now - a.step < window);
    }
}

TEST_CASE("pruned-out origins disappear from the known set") {
    AlertLedger ledger(EdgeServerId{0});
    ledger.record(make_alert(1, 2, 0, OriginServerId{0}));
    ledger.record(make_alert(1, 9, 0, OriginServerId{1}));
    ledger.prune(9, 3);  // drops everything at step <= 6
    CHECK(ledger.known_origins() == std::vector<OriginServerId>{OriginServerId{1}});
    CHECK(ledger.window_count(OriginServerId{0}, 9, 3) == 0);
}

TEST_CASE("build_message on an empty ledger yields an empty alert set") {
    AlertLedger ledger(EdgeServerId{2});
    GossipMessage msg = build_message(ledger, kOrigin, 5, 10);
    CHECK(msg.sender == EdgeServerId{2});
    CHECK(msg.origin == kOrigin);
    CHECK(msg.alert_count() == 0);
    CHECK(msg.alerts().empty());
}

TEST_CASE("build_message carries exactly the in-window alerts") {
    AlertLedger ledger(EdgeServerId{0});
    std::vector<Alert> in_window = {make_alert(1, 8), make_alert(2, 9), make_alert(3, 10)};
    for (const Alert& a : in_window) ledger.record(a);

    GossipMessage msg = build_message(ledger, kOrigin, 10, 10);
    CHECK(as_set(msg.alerts()) == as_set(in_window));
}

TEST_CASE("build_message filters by origin in a mixed ledger") {
    OriginServerId other{1};
    std::vector<Alert> all = {make_alert(1, 3), make_alert(2, 3, 0, other), make_alert(2, 4),
                              make_alert(3, 4, 1, other)};

    AlertLedger ledger(EdgeServerId{0});
    for (const Alert& a : all) ledger.record(a);

    // oracle: filter the explicit set
    std::set<Alert> expected;
    for (const Alert& a : all) {
        if (a.origin == kOrigin) expected.insert(a);
    }
    CHECK(as_set(build_message(ledger, kOrigin, 4, 10).alerts()) == expected);
}

TEST_CASE("build_message excludes out-of-window alerts even without a prior prune") {
    AlertLedger ledger(EdgeServerId{0});
    ledger.record(make_alert(1, 2));
    ledger.record(make_alert(1, 9));
    GossipMessage msg = build_message(ledger, kOrigin, 9, 5);  // window (4, 9]
    CHECK(as_set(msg.alerts()) == as_set({make_alert(1, 9)}));
}

TEST_CASE("select_recipients with v=0 picks nobody and still consumes one draw per peer") {
    PeerView view = PeerView::full_mesh(EdgeServerId{0}, 4);
    RandomStream rng(7);
    CHECK(select_recipients(view, 0.0, rng).empty());

    // the stream advanced by exactly |peers| draws
    RandomStream reference(7);
    for (std::size_t i = 0; i < view.peers.size(); ++i) reference.next_unit();
    CHECK(rng.next_unit() == reference.next_unit());
}

TEST_CASE("select_recipients with v=1 picks every peer") {
    PeerView view = PeerView::full_mesh(EdgeServerId{4}, 10);
    RandomStream rng(1);
    auto recipients = select_recipients(view, 1.0, rng);
    CHECK(recipients.size() == 9);
    CHECK(recipients == view.peers);
}

TEST_CASE("peer views exclude the owner and cover everyone else") {
    for (std::int32_t s = 0; s < 5; ++s) {
        PeerView view = PeerView::full_mesh(EdgeServerId{s}, 5);
        CHECK(view.peers.size() == 4);
        CHECK(std::is_sorted(view.peers.begin(), view.peers.end()));
        CHECK(std::find(view.peers.begin(), view.peers.end(), view.self) == view.peers.end());
    }
}

TEST_CASE("select_recipients never returns the owner") {
    PeerView view = PeerView::full_mesh(EdgeServerId{3}, 8);
    RandomStream rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        for (EdgeServerId r : select_recipients(view, 0.7, rng)) CHECK(r != view.self);
    }
}

TEST_CASE("fan-out expectation: mean recipients approaches v*(S-1)") {
    const int trials = 10000;
    const double v = 0.5;
    const std::int32_t edge_count = 75;
    PeerView view = PeerView::full_mesh(EdgeServerId{0}, edge_count);

    RandomStream rng(123);
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        total += static_cast<double>(select_recipients(view, v, rng).size());
    }
    double mean = total / trials;

    double expected = v * (edge_count - 1);  // 37.0
    double sigma = std::sqrt((edge_count - 1) * v * (1.0 - v));
    double tolerance = 3.0 * sigma / std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(mean - expected) <= tolerance);
}

TEST_CASE("replay determinism: equal seeds give equal recipient sets") {
    PeerView view = PeerView::full_mesh(EdgeServerId{0}, 75);
    RandomStream a(2024), b(2024);
    for (int round = 0; round < 50; ++round) {
        CHECK(select_recipients(view, 0.5, a) == select_recipients(view, 0.5, b));
    }
}

TEST_CASE("gossip_round with v=0 sends nothing regardless of ledger contents") {
    EdgeState edge(EdgeServerId{0}, 4);
    for (int i = 0; i < 3; ++i) edge.ledger.record(make_alert(0, 5, i));
    RandomStream rng(5);
    CHECK(gossip_round(edge, kOrigin, 5, 10, 0.0, rng).empty());
}

TEST_CASE("gossip_round with v=1 sends the same message to every peer") {
    EdgeState edge(EdgeServerId{0}, 4);
    std::vector<Alert> alerts = {make_alert(0, 4, 0), make_alert(0, 5, 0), make_alert(0, 5, 1)};
    for (const Alert& a : alerts) edge.ledger.record(a);

    RandomStream rng(5);
    auto sends = gossip_round(edge, kOrigin, 5, 10, 1.0, rng);
    REQUIRE(sends.size() == 3);
    for (std::size_t i = 0; i < sends.size(); ++i) {
        CHECK(sends[i].first == edge.view.peers[i]);
        CHECK(sends[i].second.sender == EdgeServerId{0});
        CHECK(as_set(sends[i].second.alerts()) == as_set(alerts));
    }
}

TEST_CASE("gossip_round prunes before building the message") {
    EdgeState edge(EdgeServerId{0}, 3);
    edge.ledger.record(make_alert(0, 1));
    edge.ledger.record(make_alert(0, 9));
    RandomStream rng(11);
    auto sends = gossip_round(edge, kOrigin, 9, 5, 1.0, rng);
    REQUIRE(sends.size() == 2);
    CHECK(as_set(sends[0].second.alerts()) == as_set({make_alert(0, 9)}));
    CHECK(edge.ledger.total_alerts() == 1);
}

TEST_CASE("gossip_round recipients replay select_recipients under the same seed") {
    EdgeState edge(EdgeServerId{0}, 75);
    edge.ledger.record(make_alert(0, 3));

    RandomStream rng_round(31337);
    auto sends = gossip_round(edge, kOrigin, 3, 10, 0.5, rng_round);
    std::vector<EdgeServerId> recipients;
    for (const auto& [to, msg] : sends) recipients.push_back(to);

    RandomStream rng_select(31337);
    CHECK(recipients == select_recipients(edge.view, 0.5, rng_select));
}

TEST_CASE("choose_trigger_origin prefers the pending alert's origin without drawing") {
    EdgeState edge(EdgeServerId{0}, 4);
    edge.pending_alert = make_alert(0, 6, 0, OriginServerId{2});
    RandomStream rng(3);
    CHECK(choose_trigger_origin(edge, 6, 10, rng) == OriginServerId{2});

    // no draw consumed
    RandomStream reference(3);
    CHECK(rng.next_unit() == reference.next_unit());
}

TEST_CASE("choose_trigger_origin is silent when nothing is known") {
    EdgeState edge(EdgeServerId{0}, 4);
    RandomStream rng(3);
    CHECK(choose_trigger_origin(edge, 9, 10, rng) == std::nullopt);

    RandomStream reference(3);
    CHECK(rng.next_unit() == reference.next_unit());
}

TEST_CASE("choose_trigger_origin ignores alerts that fell out of the window") {
    EdgeState edge(EdgeServerId{0}, 4);
    edge.ledger.record(make_alert(1, 2));
    RandomStream rng(3);
    CHECK(choose_trigger_origin(edge, 20, 10, rng) == std::nullopt);
}

TEST_CASE("a single known origin is chosen with probability 1 (one draw)") {
    EdgeState edge(EdgeServerId{0}, 4);
    edge.ledger.record(make_alert(1, 5));
    RandomStream rng(3);
    for (int i = 0; i < 20; ++i) CHECK(choose_trigger_origin(edge, 5, 10, rng) == kOrigin);

    // 20 draws consumed, one per invocation
    RandomStream reference(3);
    for (int i = 0; i < 20; ++i) reference.next_unit();
    CHECK(rng.next_unit() == reference.next_unit());
}

TEST_CASE("two known origins are picked roughly uniformly") {
    EdgeState edge(EdgeServerId{0}, 4);
    edge.ledger.record(make_alert(1, 5, 0, OriginServerId{0}));
    edge.ledger.record(make_alert(2, 5, 0, OriginServerId{1}));

    RandomStream rng(606);
    int first = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        auto chosen = choose_trigger_origin(edge, 5, 10, rng);
        REQUIRE(chosen.has_value());
        if (*chosen == OriginServerId{0}) ++first;
    }
    // binomial(10000, 0.5): 3 sigma = 150
    CHECK(std::abs(first - trials / 2) <= 150);
}
