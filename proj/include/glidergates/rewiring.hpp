#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "glidergates/network.hpp"
#include "glidergates/rng.hpp"

namespace gg {

inline constexpr int kSwapAttemptBudget = 200;

// A degree-preserving target swap: after application, edge_a.src points at
// edge_b's old target and vice versa. Slots name the CSR entries; weights
// live on the sources, so they never move.
struct Swap {
    uint32_t src_a = 0, old_dst_a = 0;
    uint32_t src_b = 0, old_dst_b = 0;
    uint32_t slot_a = 0, slot_b = 0;
};

class RewireJournal {
  public:
    size_t size() const { return applied_.size(); }
    bool empty() const { return applied_.empty(); }
    const Swap& at(size_t i) const { return applied_[i]; }
    const std::vector<Swap>& entries() const { return applied_; }

    void record(const Swap& s) { applied_.push_back(s); }

    Swap pop() {
        Swap s = applied_.back();
        applied_.pop_back();
        return s;
    }

  private:
    std::vector<Swap> applied_;
};

using NodePredicate = std::function<bool(uint32_t)>;

namespace detail {

// Candidate edge slots whose current target satisfies the window (both
// post-swap targets must lie inside it, and the swapped targets are exactly
// the two current ones), plus a per-candidate source-filter flag. A swap that
// keeps both targets inside the window leaves the slot set valid, as does an
// apply immediately followed by its undo.
struct CandidateCache {
    std::vector<uint32_t> slots;
    std::vector<uint8_t> source_ok;

    template <typename WindowFn, typename FilterFn>
    void rebuild(const Network& net, WindowFn&& window, FilterFn&& filter) {
        slots.clear();
        for (uint32_t e = 0; e < net.edge_count(); ++e)
            if (window(net.out_dst[e])) slots.push_back(e);
        source_ok.resize(slots.size());
        for (size_t i = 0; i < slots.size(); ++i)
            source_ok[i] = filter(net.edge_src[slots[i]]) ? 1 : 0;
    }
};

}  // namespace detail

// Uniformly samples a valid swap: both post-swap targets inside the window,
// at least one source passing the filter, no self-loop, no duplicate ordered
// pair, and neither new edge longer than max_len. Empty optional after the
// attempt budget is exhausted.
inline std::optional<Swap> propose_swap_from(const Network& net,
                                             const std::vector<uint32_t>& candidate_slots,
                                             const std::vector<uint8_t>& source_ok,
                                             double max_len, Rng& rng,
                                             int attempt_budget = kSwapAttemptBudget) {
    size_t m = candidate_slots.size();
    if (m < 2) return std::nullopt;
    for (int tries = 0; tries < attempt_budget; ++tries) {
        size_t ia = rng.uniform_index(m);
        size_t ib = rng.uniform_index(m);
        if (ia == ib) continue;
        if (!source_ok[ia] && !source_ok[ib]) continue;
        uint32_t ea = candidate_slots[ia], eb = candidate_slots[ib];
        uint32_t src_a = net.edge_src[ea], dst_a = net.out_dst[ea];
        uint32_t src_b = net.edge_src[eb], dst_b = net.out_dst[eb];
        if (src_a == dst_b || src_b == dst_a) continue;
        if (net.edge_exists(src_a, dst_b) || net.edge_exists(src_b, dst_a)) continue;
        if (dist(net.pos[src_a], net.pos[dst_b]) > max_len) continue;
        if (dist(net.pos[src_b], net.pos[dst_a]) > max_len) continue;
        return Swap{src_a, dst_a, src_b, dst_b, ea, eb};
    }
    return std::nullopt;
}

inline std::optional<Swap> propose_swap(const Network& net, const NodePredicate& source_filter,
                                        const NodePredicate& window, double max_len, Rng& rng,
                                        int attempt_budget = kSwapAttemptBudget) {
    detail::CandidateCache cands;
    cands.rebuild(net, window, source_filter);
    return propose_swap_from(net, cands.slots, cands.source_ok, max_len, rng, attempt_budget);
}

// Applies the swap and records it. Throws if the network changed since the
// proposal (stale slots).
inline void apply_swap(Network& net, RewireJournal& journal, const Swap& s) {
    if (s.slot_a >= net.edge_count() || s.slot_b >= net.edge_count() ||
        net.edge_src[s.slot_a] != s.src_a || net.out_dst[s.slot_a] != s.old_dst_a ||
        net.edge_src[s.slot_b] != s.src_b || net.out_dst[s.slot_b] != s.old_dst_b)
        throw std::invalid_argument("stale swap: network changed since proposal");
    net.edge_set_erase(s.src_a, s.old_dst_a);
    net.edge_set_erase(s.src_b, s.old_dst_b);
    net.out_dst[s.slot_a] = s.old_dst_b;
    net.out_dst[s.slot_b] = s.old_dst_a;
    net.edge_set_insert(s.src_a, s.old_dst_b);
    net.edge_set_insert(s.src_b, s.old_dst_a);
    journal.record(s);
}

// Undoes the newest `count` journal entries, newest first.
inline void undo_last(Network& net, RewireJournal& journal, size_t count) {
    if (count > journal.size()) throw std::invalid_argument("undo underflows the journal");
    for (size_t k = 0; k < count; ++k) {
        Swap s = journal.pop();
        net.edge_set_erase(s.src_a, s.old_dst_b);
        net.edge_set_erase(s.src_b, s.old_dst_a);
        net.out_dst[s.slot_a] = s.old_dst_a;
        net.out_dst[s.slot_b] = s.old_dst_b;
        net.edge_set_insert(s.src_a, s.old_dst_a);
        net.edge_set_insert(s.src_b, s.old_dst_b);
    }
}

// Re-applies a journaled swap against a freshly loaded network, resolving
// slots by (src, dst) lookup.
inline void replay_swap(Network& net, RewireJournal& journal, uint32_t src_a, uint32_t old_dst_a,
                        uint32_t src_b, uint32_t old_dst_b) {
    Swap s{src_a, old_dst_a, src_b, old_dst_b, net.find_slot(src_a, old_dst_a),
           net.find_slot(src_b, old_dst_b)};
    apply_swap(net, journal, s);
}

}  // namespace gg
