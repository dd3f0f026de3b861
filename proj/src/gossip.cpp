#include "cdnsim/gossip.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <iterator>

#include "cdnsim/types.hpp"

namespace cdnsim {

namespace {

std::size_t popcount_words(const std::vector<std::uint64_t>& words) {
    std::size_t n = 0;
    for (std::uint64_t w : words) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// StepAlertSet

bool StepAlertSet::insert(std::int32_t reporter, std::int32_t sequence) {
    assert(reporter >= 0 && sequence >= 0);
    if (sequence < kMaskedSequences) {
        auto& mask = masks_[static_cast<std::size_t>(sequence)];
        std::size_t word = static_cast<std::uint32_t>(reporter) / 64;
        std::uint64_t bit = 1ULL << (static_cast<std::uint32_t>(reporter) % 64);
        if (word >= mask.size()) mask.resize(word + 1, 0);
        if (mask[word] & bit) return false;
        mask[word] |= bit;
        return true;
    }
    std::uint64_t packed = pack(reporter, sequence);
    auto it = std::lower_bound(overflow_.begin(), overflow_.end(), packed);
    if (it != overflow_.end() && *it == packed) return false;
    overflow_.insert(it, packed);
    return true;
}

bool StepAlertSet::contains(std::int32_t reporter, std::int32_t sequence) const {
    assert(reporter >= 0 && sequence >= 0);
    if (sequence < kMaskedSequences) {
        const auto& mask = masks_[static_cast<std::size_t>(sequence)];
        std::size_t word = static_cast<std::uint32_t>(reporter) / 64;
        return word < mask.size() &&
               (mask[word] >> (static_cast<std::uint32_t>(reporter) % 64)) & 1ULL;
    }
    return std::binary_search(overflow_.begin(), overflow_.end(), pack(reporter, sequence));
}

void StepAlertSet::merge(const StepAlertSet& other) {
    for (std::size_t seq = 0; seq < masks_.size(); ++seq) {
        const auto& src = other.masks_[seq];
        auto& dst = masks_[seq];
        if (src.size() > dst.size()) dst.resize(src.size(), 0);
        for (std::size_t w = 0; w < src.size(); ++w) dst[w] |= src[w];
    }
    if (!other.overflow_.empty()) {
        std::vector<std::uint64_t> merged;
        merged.reserve(overflow_.size() + other.overflow_.size());
        std::set_union(overflow_.begin(), overflow_.end(), other.overflow_.begin(),
                       other.overflow_.end(), std::back_inserter(merged));
        overflow_ = std::move(merged);
    }
}

std::size_t StepAlertSet::size() const {
    return popcount_words(masks_[0]) + popcount_words(masks_[1]) + overflow_.size();
}

// ---------------------------------------------------------------------------
// AlertWindow

std::size_t AlertWindow::alert_count() const {
    std::size_t n = 0;
    for (const auto& group : steps) n += group.alerts.size();
    return n;
}

std::vector<Alert> AlertWindow::alerts() const {
    std::vector<Alert> out;
    out.reserve(alert_count());
    for (const auto& group : steps) {
        group.alerts.for_each([&](std::int32_t reporter, std::int32_t sequence) {
            out.push_back(Alert{origin, EdgeServerId{reporter}, group.step, sequence});
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// AlertLedger

const AlertLedger::OriginEntry* AlertLedger::find(OriginServerId origin) const {
    for (const auto& entry : entries_) {
        if (entry.origin == origin) return &entry;
    }
    return nullptr;
}

AlertLedger::OriginEntry& AlertLedger::find_or_insert(OriginServerId origin) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), origin,
                               [](const OriginEntry& e, OriginServerId o) { return e.origin < o; });
    if (it != entries_.end() && it->origin == origin) return *it;
    return *entries_.insert(it, OriginEntry{origin, {}});
}

bool AlertLedger::record(const Alert& alert) {
    auto& entry = find_or_insert(alert.origin);
    auto& steps = entry.steps;
    // Alerts almost always arrive for the newest step, so search from the back.
    auto it = steps.end();
    while (it != steps.begin() && std::prev(it)->step >= alert.step) --it;
    if (it != steps.end() && it->step == alert.step) {
        return it->alerts.insert(alert.reporter.index, alert.sequence);
    }
    it = steps.insert(it, AlertWindow::StepGroup{alert.step, {}});
    return it->alerts.insert(alert.reporter.index, alert.sequence);
}

void AlertLedger::merge(const GossipMessage& message) {
    if (!message.window || message.window->steps.empty()) return;
    auto& entry = find_or_insert(message.origin);
    for (const auto& group : message.window->steps) {
        auto it = entry.steps.end();
        while (it != entry.steps.begin() && std::prev(it)->step >= group.step) --it;
        if (it != entry.steps.end() && it->step == group.step) {
            it->alerts.merge(group.alerts);
        } else {
            entry.steps.insert(it, group);
        }
    }
}

std::size_t AlertLedger::prune(Step now, Step window) {
    Step cutoff = now - window;  // drop steps <= cutoff
    std::size_t removed = 0;
    for (auto& entry : entries_) {
        auto keep_from = entry.steps.begin();
        while (keep_from != entry.steps.end() && keep_from->step <= cutoff) {
            removed += keep_from->alerts.size();
            ++keep_from;
        }
        entry.steps.erase(entry.steps.begin(), keep_from);
    }
    std::erase_if(entries_, [](const OriginEntry& e) { return e.steps.empty(); });
    return removed;
}

bool AlertLedger::contains(const Alert& alert) const {
    const OriginEntry* entry = find(alert.origin);
    if (entry == nullptr) return false;
    for (const auto& group : entry->steps) {
        if (group.step == alert.step) {
            return group.alerts.contains(alert.reporter.index, alert.sequence);
        }
    }
    return false;
}

std::size_t AlertLedger::total_alerts() const {
    std::size_t n = 0;
    for (const auto& entry : entries_) {
        for (const auto& group : entry.steps) n += group.alerts.size();
    }
    return n;
}

std::size_t AlertLedger::window_count(OriginServerId origin, Step now, Step window) const {
    const OriginEntry* entry = find(origin);
    if (entry == nullptr) return 0;
    std::size_t n = 0;
    for (const auto& group : entry->steps) {
        if (group.step > now - window && group.step <= now) n += group.alerts.size();
    }
    return n;
}

std::vector<OriginServerId> AlertLedger::known_origins() const {
    std::vector<OriginServerId> out;
    out.reserve(entries_.size());
    for (const auto& entry : entries_) out.push_back(entry.origin);
    return out;
}

std::vector<Alert> AlertLedger::alerts(OriginServerId origin) const {
    std::vector<Alert> out;
    const OriginEntry* entry = find(origin);
    if (entry == nullptr) return out;
    for (const auto& group : entry->steps) {
        group.alerts.for_each([&](std::int32_t reporter, std::int32_t sequence) {
            out.push_back(Alert{origin, EdgeServerId{reporter}, group.step, sequence});
        });
    }
    return out;
}

std::shared_ptr<const AlertWindow> AlertLedger::snapshot(OriginServerId origin, Step now,
                                                         Step window) const {
    auto snap = std::make_shared<AlertWindow>();
    snap->origin = origin;
    if (const OriginEntry* entry = find(origin)) {
        for (const auto& group : entry->steps) {
            if (group.step > now - window && group.step <= now && !group.alerts.empty()) {
                snap->steps.push_back(group);
            }
        }
    }
    return snap;
}

// ---------------------------------------------------------------------------
// Protocol operations

PeerView PeerView::full_mesh(EdgeServerId self, std::int32_t edge_count) {
    PeerView view;
    view.self = self;
    view.peers.reserve(static_cast<std::size_t>(edge_count > 0 ? edge_count - 1 : 0));
    for (std::int32_t i = 0; i < edge_count; ++i) {
        if (i != self.index) view.peers.push_back(EdgeServerId{i});
    }
    return view;
}

double choose_probability(const SimConfig& config) { return config.gossip_prob; }

std::vector<EdgeServerId> select_recipients(const PeerView& view, double v,
                                            RandomStream& rng) {
    std::vector<EdgeServerId> out;
    out.reserve(static_cast<std::size_t>(static_cast<double>(view.peers.size()) * v) + 1);
    for (EdgeServerId peer : view.peers) {
        if (rng.bernoulli(v)) out.push_back(peer);
    }
    return out;
}

GossipMessage build_message(const AlertLedger& ledger, OriginServerId origin, Step now,
                            Step window) {
    return GossipMessage{ledger.owner(), origin, ledger.snapshot(origin, now, window)};
}

std::optional<OriginServerId> choose_trigger_origin(const EdgeState& edge, Step now,
                                                    Step window, RandomStream& rng) {
    if (edge.pending_alert) return edge.pending_alert->origin;

    std::size_t candidates = 0;
    for (std::size_t i = 0; i < edge.ledger.origin_count(); ++i) {
        if (edge.ledger.window_count(edge.ledger.origin_at(i), now, window) > 0) ++candidates;
    }
    if (candidates == 0) return std::nullopt;

    std::size_t pick = rng.uniform_index(candidates);
    for (std::size_t i = 0; i < edge.ledger.origin_count(); ++i) {
        OriginServerId origin = edge.ledger.origin_at(i);
        if (edge.ledger.window_count(origin, now, window) == 0) continue;
        if (pick == 0) return origin;
        --pick;
    }
    return std::nullopt;  // unreachable
}

std::vector<std::pair<EdgeServerId, GossipMessage>> gossip_round(EdgeState& edge,
                                                                 OriginServerId origin,
                                                                 Step now, Step window,
                                                                 double v,
                                                                 RandomStream& rng) {
    edge.ledger.prune(now, window);
    GossipMessage message = build_message(edge.ledger, origin, now, window);
    std::vector<EdgeServerId> recipients = select_recipients(edge.view, v, rng);

    std::vector<std::pair<EdgeServerId, GossipMessage>> out;
    out.reserve(recipients.size());
    for (EdgeServerId recipient : recipients) {
        out.emplace_back(recipient, message);
    }
    return out;
}

}  // namespace cdnsim
