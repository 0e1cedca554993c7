#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "glidergates/dynamics.hpp"
#include "glidergates/gate_spec.hpp"
#include "glidergates/regions.hpp"
#include "glidergates/rng.hpp"

namespace gg {

// Activation order and per-activation random waits used in one evaluation.
struct ActivationSchedule {
    std::vector<uint32_t> order;   // input node ids, activation order
    std::vector<uint32_t> delays;  // steps advanced after each activation
};

struct PatternResult {
    PatternMask pattern = 0;
    ActivationSchedule schedule;
    bool cycle_found = false;
    bool macro_period_ok = false;
    bool rest_ok = false;
    uint32_t measured_period = 0;
    FitnessValue fitness;
    StateVector active_nodes;  // active at any point of the evaluation
    // Indexed by gate gun; NaN for inactive guns. See measure_shot_progress.
    std::vector<double> gun_progress;
    std::vector<uint8_t> gun_constrained;
    double corridor_progress = std::numeric_limits<double>::quiet_NaN();

    bool healthy() const { return cycle_found && macro_period_ok && rest_ok; }
};

// Drives one gate on one network: keeps the running state, cached layouts,
// and readout node lists. The caller owns exclusive access to the network;
// rewiring between evaluations is fine (layout geometry is position-only and
// positions never change).
class GateSession {
  public:
    GateSession(Network& net, const GateSpec& gate,
                uint32_t cycle_max_steps = kDefaultCycleMaxSteps,
                uint32_t rest_max_steps = kDefaultRestMaxSteps)
        : net_(&net),
          gate_(&gate),
          dyn_(net),
          cycle_max_(cycle_max_steps),
          rest_max_(rest_max_steps),
          state_(net.n()) {
        gate.validate(net);
        for (PatternMask m : gate.patterns()) layouts_.emplace(m, build_layout(net, gate, m));
        readout_nodes_.resize(gate.num_outputs());
        for (size_t o = 0; o < gate.num_outputs(); ++o) {
            const OutputSpec& out = gate.outputs[o];
            for (uint32_t i = 0; i < net.n(); ++i)
                if (dist(net.pos[i], out.center) <= out.readout_radius)
                    readout_nodes_[o].push_back(i);
        }
    }

    const GateSpec& gate() const { return *gate_; }
    Dynamics& dynamics() { return dyn_; }
    const StateVector& state() const { return state_; }
    RegionLayout& layout(PatternMask m) { return layouts_.at(m); }

    void reset_to_rest() { state_ = dyn_.zero_state(); }

    // Drops all inputs and advances a random number of steps into the decay.
    void drop_and_settle(Rng& rng) {
        auto settled =
            dyn_.settle_random_steps(state_, InputAssignment::all_off(), rng, cycle_max_);
        state_ = settled ? std::move(*settled) : dyn_.zero_state();
    }

    // Activates the pattern's input nodes in random order with random waits,
    // finds the macro cycle, scores it, and spot-checks relaxation from one
    // random cycle phase. Leaves the running state on the macro cycle.
    PatternResult evaluate_pattern(PatternMask pattern, Rng& rng) {
        PatternResult r;
        r.pattern = pattern;
        size_t n_guns = gate_->num_guns();
        r.gun_progress.assign(n_guns, std::numeric_limits<double>::quiet_NaN());
        r.gun_constrained.assign(n_guns, 0);
        r.active_nodes = StateVector(net_->n());

        for (size_t g = 0; g < n_guns; ++g)
            if (gate_->gun_active(pattern, g)) r.schedule.order.push_back(gate_->guns[g].input_node);
        rng.shuffle(r.schedule.order);

        dyn_.set_activity_sink(&r.active_nodes);
        InputAssignment on;
        bool found = true;
        for (uint32_t node : r.schedule.order) {
            on.on.insert(std::lower_bound(on.on.begin(), on.on.end(), node), node);
            auto cycle = dyn_.find_limit_cycle(state_, on, cycle_max_);
            if (!cycle) {
                found = false;
                state_ = dyn_.last_trajectory().back();
                break;
            }
            uint32_t span = cycle->transient_length + cycle->period;
            uint32_t u = static_cast<uint32_t>(rng.uniform_u64(span + 1));
            r.schedule.delays.push_back(u);
            const auto& traj = dyn_.last_trajectory();
            state_ = u < traj.size() ? traj[u] : traj[cycle->transient_length];
            last_cycle_ = std::move(*cycle);
        }
        dyn_.set_activity_sink(nullptr);
        if (!found) {
            last_cycle_valid_ = false;
            return r;
        }

        r.cycle_found = true;
        last_cycle_valid_ = true;
        r.measured_period = last_cycle_.period;
        r.macro_period_ok = last_cycle_.period == gate_->macro_period(pattern);

        RegionLayout& layout = layouts_.at(pattern);
        r.fitness = fitness(dyn_, last_cycle_, layout);
        layout.phases = r.fitness.phases;
        ShotProgress sp = measure_shot_progress(last_cycle_, layout, *net_);
        size_t active_idx = 0;
        for (size_t g = 0; g < n_guns; ++g) {
            if (!gate_->gun_active(pattern, g)) continue;
            r.gun_progress[g] = sp.per_gun[active_idx];
            r.gun_constrained[g] = sp.constrained[active_idx];
            ++active_idx;
        }
        r.corridor_progress = sp.corridor;

        uint32_t phase = static_cast<uint32_t>(rng.uniform_u64(last_cycle_.period));
        r.rest_ok = dyn_.relaxes_to_rest(last_cycle_.states[phase], rest_max_);
        state_ = last_cycle_.states[0];
        return r;
    }

    bool last_cycle_valid() const { return last_cycle_valid_; }
    const LimitCycle& last_cycle() const { return last_cycle_; }

    // TRUE iff any node inside the readout disk is active in any cycle state.
    // All-FALSE when the last evaluation found no cycle.
    std::vector<bool> read_outputs() const {
        std::vector<bool> out(gate_->num_outputs(), false);
        if (!last_cycle_valid_) return out;
        for (size_t o = 0; o < out.size(); ++o) {
            for (uint32_t i : readout_nodes_[o]) {
                for (const StateVector& s : last_cycle_.states) {
                    if (s.get(i)) {
                        out[o] = true;
                        break;
                    }
                }
                if (out[o]) break;
            }
        }
        return out;
    }

    // Relaxation check from every cycle phase (certification).
    bool rest_from_all_phases() {
        if (!last_cycle_valid_) return false;
        for (const StateVector& s : last_cycle_.states)
            if (!dyn_.relaxes_to_rest(s, rest_max_)) return false;
        return true;
    }

  private:
    Network* net_;
    const GateSpec* gate_;
    Dynamics dyn_;
    uint32_t cycle_max_;
    uint32_t rest_max_;
    StateVector state_;
    std::map<PatternMask, RegionLayout> layouts_;
    std::vector<std::vector<uint32_t>> readout_nodes_;
    LimitCycle last_cycle_;
    bool last_cycle_valid_ = false;
};

// One-shot evaluation from a network at rest.
inline PatternResult evaluate_pattern(Network& net, const GateSpec& gate, PatternMask pattern,
                                      Rng& rng) {
    GateSession session(net, gate);
    session.reset_to_rest();
    return session.evaluate_pattern(pattern, rng);
}

// Sum of per-pattern fitness over all non-empty patterns in ascending mask
// order, with inputs dropped and a random settle between patterns.
inline double total_fitness(Network& net, const GateSpec& gate, Rng& rng,
                            std::vector<PatternResult>* per_pattern = nullptr) {
    GateSession session(net, gate);
    session.reset_to_rest();
    double total = 0.0;
    for (PatternMask m : gate.patterns()) {
        PatternResult r = session.evaluate_pattern(m, rng);
        total += r.fitness.total;
        if (per_pattern) per_pattern->push_back(r);
        session.drop_and_settle(rng);
    }
    return total;
}

}  // namespace gg
