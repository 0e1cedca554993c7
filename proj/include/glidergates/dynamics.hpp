#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "glidergates/network.hpp"
#include "glidergates/rng.hpp"

namespace gg {

inline constexpr uint32_t kDefaultCycleMaxSteps = 1000;
inline constexpr uint32_t kDefaultRestMaxSteps = 500;

// Packed per-node binary state.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}

    uint32_t size() const { return n_; }

    bool get(uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(uint32_t i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }

    void reset(uint32_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

    void assign(uint32_t i, bool v) { v ? set(i) : reset(i); }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    bool is_zero() const {
        for (uint64_t w : words_)
            if (w) return false;
        return true;
    }

    uint32_t count() const {
        uint32_t c = 0;
        for (uint64_t w : words_) c += static_cast<uint32_t>(__builtin_popcountll(w));
        return c;
    }

    void or_with(const StateVector& o) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    }

    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (size_t w = 0; w < words_.size(); ++w) {
            uint64_t bits = words_[w];
            while (bits) {
                uint32_t b = static_cast<uint32_t>(__builtin_ctzll(bits));
                fn(static_cast<uint32_t>(w * 64 + b));
                bits &= bits - 1;
            }
        }
    }

    uint64_t digest() const {
        uint64_t h = 0x2545f4914f6cdd1dull;
        for (uint64_t w : words_) h = mix64(h ^ w);
        return h;
    }

    bool operator==(const StateVector& o) const = default;

  private:
    uint32_t n_ = 0;
    std::vector<uint64_t> words_;
};

// Set of input nodes pinned ON. Every designated input node absent from the
// set is pinned OFF: input-node bits are always externally controlled.
struct InputAssignment {
    std::vector<uint32_t> on;  // sorted

    static InputAssignment all_off() { return {}; }

    static InputAssignment single(uint32_t node) { return {{node}}; }

    bool is_on(uint32_t node) const {
        return std::binary_search(on.begin(), on.end(), node);
    }
};

struct LimitCycle {
    uint32_t transient_length = 0;
    uint32_t period = 0;
    std::vector<StateVector> states;  // one full period, in step order
};

// Synchronous threshold dynamics over one network. Holds scratch buffers, so
// each instance is single-threaded; the referenced network may be shared
// read-only across instances. Stays valid across rewiring (degrees fixed).
class Dynamics {
  public:
    explicit Dynamics(const Network& net)
        : net_(&net), acc_(net.n(), 0), seen_(net.n(), 0) {
        touched_.reserve(net.n());
    }

    const Network& net() const { return *net_; }

    StateVector zero_state() const { return StateVector(net_->n()); }

    // Pins every designated input node's bit per the assignment.
    void apply_inputs(StateVector& s, const InputAssignment& inputs) const {
        for (uint32_t id : net_->input_nodes) s.assign(id, inputs.is_on(id));
    }

    // One synchronous update: non-input node i turns on iff its summed
    // weighted input exceeds the threshold; input-node bits come from the
    // assignment regardless of incoming signal.
    void step_into(const StateVector& cur, StateVector& next, const InputAssignment& inputs) {
        accumulate(cur);
        next.clear();
        const int h = net_->h();
        for (uint32_t i : touched_) {
            if (acc_[i] > h && !net_->is_input[i]) next.set(i);
            acc_[i] = 0;
            seen_[i] = 0;
        }
        touched_.clear();
        for (uint32_t id : inputs.on) next.set(id);
        if (activity_sink_) activity_sink_->or_with(next);
    }

    StateVector step(const StateVector& cur, const InputAssignment& inputs) {
        StateVector next(net_->n());
        step_into(cur, next, inputs);
        return next;
    }

    // Summed weighted input S_i for the given state; calls fn(i, S_i) for
    // every node with a nonzero accumulator.
    template <typename Fn>
    void for_each_driven(const StateVector& state, Fn&& fn) {
        accumulate(state);
        for (uint32_t i : touched_) {
            if (acc_[i] != 0) fn(i, acc_[i]);
            acc_[i] = 0;
            seen_[i] = 0;
        }
        touched_.clear();
    }

    // Iterates from `start` (with inputs applied) until a previously seen
    // state repeats; nullopt if no repeat within max_steps. The trajectory
    // (state after u steps at index u) remains readable via last_trajectory().
    std::optional<LimitCycle> find_limit_cycle(const StateVector& start,
                                               const InputAssignment& inputs,
                                               uint32_t max_steps = kDefaultCycleMaxSteps) {
        if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
        traj_.clear();
        seen_at_.clear();
        StateVector cur = start;
        apply_inputs(cur, inputs);
        if (activity_sink_) activity_sink_->or_with(cur);
        for (uint32_t t = 0;; ++t) {
            uint64_t d = cur.digest();
            auto it = seen_at_.find(d);
            if (it != seen_at_.end()) {
                for (uint32_t t0 : it->second) {
                    if (traj_[t0] == cur) {
                        LimitCycle cycle;
                        cycle.transient_length = t0;
                        cycle.period = t - t0;
                        cycle.states.assign(traj_.begin() + t0, traj_.begin() + t);
                        return cycle;
                    }
                }
                it->second.push_back(t);
            } else {
                seen_at_.emplace(d, std::vector<uint32_t>{t});
            }
            traj_.push_back(cur);
            if (t >= max_steps) return std::nullopt;
            StateVector next(net_->n());
            step_into(cur, next, inputs);
            cur = std::move(next);
        }
    }

    const std::vector<StateVector>& last_trajectory() const { return traj_; }

    // True iff the all-zero state is reached within max_steps after dropping
    // all inputs.
    bool relaxes_to_rest(const StateVector& state, uint32_t max_steps = kDefaultRestMaxSteps) {
        StateVector cur = state;
        apply_inputs(cur, InputAssignment::all_off());
        for (uint32_t t = 0; t <= max_steps; ++t) {
            if (cur.is_zero()) return true;
            if (t == max_steps) break;
            StateVector next(net_->n());
            step_into(cur, next, InputAssignment::all_off());
            cur = std::move(next);
        }
        return false;
    }

    // State after u steps from `state`, u uniform on [0, transient + period]
    // of the first limit cycle reached. nullopt if no cycle is found.
    std::optional<StateVector> settle_random_steps(const StateVector& state,
                                                   const InputAssignment& inputs, Rng& rng,
                                                   uint32_t max_steps = kDefaultCycleMaxSteps) {
        auto cycle = find_limit_cycle(state, inputs, max_steps);
        if (!cycle) return std::nullopt;
        uint32_t span = cycle->transient_length + cycle->period;
        uint32_t u = static_cast<uint32_t>(rng.uniform_u64(span + 1));
        if (u < traj_.size()) return traj_[u];
        return traj_[cycle->transient_length];  // u == span: cycle wraps
    }

    // When set, every state produced by stepping (and every cycle-search
    // start) is OR-ed into the sink.
    void set_activity_sink(StateVector* sink) { activity_sink_ = sink; }

  private:
    void accumulate(const StateVector& state) {
        const Network& net = *net_;
        state.for_each_set([&](uint32_t j) {
            int w = net.source_weight(j);
            for (uint32_t e = net.out_begin(j); e < net.out_end(j); ++e) {
                uint32_t i = net.out_dst[e];
                if (!seen_[i]) {
                    seen_[i] = 1;
                    touched_.push_back(i);
                }
                acc_[i] += w;
            }
        });
    }

    const Network* net_;
    std::vector<int32_t> acc_;
    std::vector<uint8_t> seen_;
    std::vector<uint32_t> touched_;
    std::vector<StateVector> traj_;
    std::unordered_map<uint64_t, std::vector<uint32_t>> seen_at_;
    StateVector* activity_sink_ = nullptr;
};

// Convenience one-shot wrappers.
inline StateVector step(const Network& net, const StateVector& state,
                        const InputAssignment& inputs) {
    Dynamics dyn(net);
    return dyn.step(state, inputs);
}

inline std::optional<LimitCycle> find_limit_cycle(const Network& net, const StateVector& start,
                                                  const InputAssignment& inputs,
                                                  uint32_t max_steps = kDefaultCycleMaxSteps) {
    Dynamics dyn(net);
    return dyn.find_limit_cycle(start, inputs, max_steps);
}

inline bool relaxes_to_rest(const Network& net, const StateVector& state,
                            uint32_t max_steps = kDefaultRestMaxSteps) {
    Dynamics dyn(net);
    return dyn.relaxes_to_rest(state, max_steps);
}

inline std::optional<StateVector> settle_random_steps(const Network& net,
                                                      const StateVector& state,
                                                      const InputAssignment& inputs, Rng& rng,
                                                      uint32_t max_steps = kDefaultCycleMaxSteps) {
    Dynamics dyn(net);
    return dyn.settle_random_steps(state, inputs, rng, max_steps);
}

}  // namespace gg
