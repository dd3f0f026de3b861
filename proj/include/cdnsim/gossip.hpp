#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cdnsim/rng.hpp"
#include "cdnsim/types.hpp"

namespace cdnsim {

struct SimConfig;

// Distinct (reporter, sequence) pairs for one (origin, step).
//
// Sequences 0 and 1 live in per-reporter bitmaps; the simulator mints at
// most two alerts per edge per step, so set union during gossip delivery is
// a handful of word ORs. Larger sequences go to a sorted overflow vector so
// the container still holds arbitrary alerts.
class StepAlertSet {
public:
    // Returns false when the pair was already present.
    bool insert(std::int32_t reporter, std::int32_t sequence);
    bool contains(std::int32_t reporter, std::int32_t sequence) const;

    // Set union with `other`.
    void merge(const StepAlertSet& other);

    std::size_t size() const;
    bool empty() const { return size() == 0; }

    // Visits pairs in ascending (reporter, sequence) order.
    template <typename Fn>
    void for_each(Fn&& fn) const;

private:
    static constexpr std::int32_t kMaskedSequences = 2;

    std::array<std::vector<std::uint64_t>, kMaskedSequences> masks_;
    std::vector<std::uint64_t> overflow_;  // (reporter << 32) | sequence, sorted

    static std::uint64_t pack(std::int32_t reporter, std::int32_t sequence) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(reporter)) << 32) |
               static_cast<std::uint32_t>(sequence);
    }
};

// Immutable snapshot of one origin's alerts grouped by step; the payload of
// a gossip message. Shared by pointer between all recipients of a send.
struct AlertWindow {
    struct StepGroup {
        Step step = 0;
        StepAlertSet alerts;
    };

    OriginServerId origin;
    std::vector<StepGroup> steps;  // ascending step, no empty groups

    std::size_t alert_count() const;
    std::vector<Alert> alerts() const;  // materialized, ascending
};

// A push message: the sender's current alert window for one origin. All
// alerts share `origin` and the set contains no duplicates, by construction.
struct GossipMessage {
    EdgeServerId sender;
    OriginServerId origin;
    std::shared_ptr<const AlertWindow> window;

    std::size_t alert_count() const { return window ? window->alert_count() : 0; }
    std::vector<Alert> alerts() const { return window ? window->alerts() : std::vector<Alert>{}; }
};

// Per-edge-server deduplicating alert store, pruned to the moving window.
class AlertLedger {
public:
    explicit AlertLedger(EdgeServerId owner) : owner_(owner) {}

    EdgeServerId owner() const { return owner_; }

    // Inserts one alert; returns false if it was already present.
    bool record(const Alert& alert);

    // Set-unions a gossip message's alerts into the store.
    void merge(const GossipMessage& message);

    // Drops every alert with step <= now - window, i.e. retains exactly the
    // half-open interval (now - window, now]. Returns the number removed.
    std::size_t prune(Step now, Step window);

    bool contains(const Alert& alert) const;
    std::size_t total_alerts() const;

    // Distinct alerts for `origin` with step in (now - window, now].
    std::size_t window_count(OriginServerId origin, Step now, Step window) const;

    // Origins with at least one stored alert, ascending.
    std::size_t origin_count() const { return entries_.size(); }
    OriginServerId origin_at(std::size_t i) const { return entries_[i].origin; }
    std::vector<OriginServerId> known_origins() const;

    // Stored alerts for `origin`, ascending (step, reporter, sequence).
    std::vector<Alert> alerts(OriginServerId origin) const;

    // Snapshot of the (now - window, now] contents for `origin`.
    std::shared_ptr<const AlertWindow> snapshot(OriginServerId origin, Step now,
                                                Step window) const;

private:
    struct OriginEntry {
        OriginServerId origin;
        std::vector<AlertWindow::StepGroup> steps;  // ascending step
    };

    const OriginEntry* find(OriginServerId origin) const;
    OriginEntry& find_or_insert(OriginServerId origin);

    EdgeServerId owner_;
    std::vector<OriginEntry> entries_;  // ascending origin, no empty entries after prune
};

// Full-mesh membership: every edge server knows every other.
struct PeerView {
    EdgeServerId self;
    std::vector<EdgeServerId> peers;  // ascending, never contains self

    static PeerView full_mesh(EdgeServerId self, std::int32_t edge_count);
};

// Everything one edge server carries between steps. The pending alert is
// armed when the origin server replies to this edge directly and is cleared
// after the edge's gossip opportunity of that step.
struct EdgeState {
    AlertLedger ledger;
    PeerView view;
    std::optional<Alert> pending_alert;

    EdgeState(EdgeServerId self, std::int32_t edge_count)
        : ledger(self), view(PeerView::full_mesh(self, edge_count)) {}
};

// The dissemination probability is a run-wide constant taken from the
// configuration; no adaptive scheme.
double choose_probability(const SimConfig& config);

// Each peer is included independently with probability v. Consumes exactly
// one draw per peer, in ascending peer-id order, regardless of v; that draw
// discipline is part of the determinism contract.
std::vector<EdgeServerId> select_recipients(const PeerView& view, double v,
                                            RandomStream& rng);

// Message carrying the ledger's (now - window, now] contents for `origin`.
GossipMessage build_message(const AlertLedger& ledger, OriginServerId origin, Step now,
                            Step window);

// Picks the origin to gossip about: the pending alert's origin if one is
// armed; otherwise a uniform choice among origins with in-window alerts
// (one draw, even for a single candidate); otherwise none, meaning the edge
// stays silent this step and no empty message is produced.
std::optional<OriginServerId> choose_trigger_origin(const EdgeState& edge, Step now,
                                                    Step window, RandomStream& rng);

// One gossip opportunity: prune, build the window message for `origin`,
// select recipients, and pair the same message with each recipient.
std::vector<std::pair<EdgeServerId, GossipMessage>> gossip_round(EdgeState& edge,
                                                                 OriginServerId origin,
                                                                 Step now, Step window,
                                                                 double v,
                                                                 RandomStream& rng);

template <typename Fn>
void StepAlertSet::for_each(Fn&& fn) const {
    std::size_t next_overflow = 0;
    auto emit_overflow_before = [&](std::uint64_t limit) {
        while (next_overflow < overflow_.size() && overflow_[next_overflow] < limit) {
            std::uint64_t packed = overflow_[next_overflow++];
            fn(static_cast<std::int32_t>(packed >> 32),
               static_cast<std::int32_t>(packed & 0xffffffffULL));
        }
    };

    std::size_t words = std::max(masks_[0].size(), masks_[1].size());
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits0 = w < masks_[0].size() ? masks_[0][w] : 0;
        std::uint64_t bits1 = w < masks_[1].size() ? masks_[1][w] : 0;
        std::uint64_t any = bits0 | bits1;
        while (any != 0) {
            int bit = std::countr_zero(any);
            any &= any - 1;
            auto reporter = static_cast<std::int32_t>(w * 64 + static_cast<std::size_t>(bit));
            emit_overflow_before(pack(reporter, 0));
            if ((bits0 >> bit) & 1ULL) fn(reporter, 0);
            if ((bits1 >> bit) & 1ULL) fn(reporter, 1);
            emit_overflow_before(pack(reporter + 1, 0));
        }
    }
    // Valid pairs never pack to ~0, so this drains the whole tail.
    emit_overflow_before(~0ULL);
}

}  // namespace cdnsim
