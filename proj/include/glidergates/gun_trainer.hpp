#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "glidergates/dynamics.hpp"
#include "glidergates/gate_spec.hpp"
#include "glidergates/regions.hpp"
#include "glidergates/rewiring.hpp"
#include "glidergates/rng.hpp"

namespace gg {

struct GunTrainConfig {
    uint32_t desired_period = 7;
    uint64_t period_budget = 50000;
    uint64_t shape_budget = 20000;
    // Period-stage rewiring keeps both post-swap targets within this radius
    // of the input node; defaults to the gun's D.
    double local_radius = 0.0;
    uint32_t cycle_max_steps = kDefaultCycleMaxSteps;
    uint32_t rest_max_steps = kDefaultRestMaxSteps;
    int swap_attempt_budget = kSwapAttemptBudget;

    void validate() const {
        if (desired_period < 2) throw std::invalid_argument("desired_period must be >= 2");
        if (period_budget < 1 || shape_budget < 1)
            throw std::invalid_argument("budgets must be >= 1");
    }
};

struct GunTraceRow {
    uint64_t attempt = 0;
    bool accepted = false;
    double fitness = 0.0;
    uint32_t period = 0;
};

// One evaluation of a gun: drive the pinned input from `start`, find the
// cycle, score it, and spot-check relaxation from one random cycle phase.
struct GunMeasure {
    bool cycle_found = false;
    bool rest_ok = false;
    uint32_t period = 0;
    FitnessValue fv;
    StateVector cycle_state;   // resume point on the cycle
    StateVector active_union;  // nodes active at any point of the evaluation
    double progress = 0.0;     // slowest-shot progress, normalized
    bool ok(uint32_t desired_period) const {
        return cycle_found && period == desired_period && rest_ok;
    }
};

namespace detail {

inline GunMeasure measure_gun(Dynamics& dyn, RegionLayout& layout, const GunSpec& gun,
                              const StateVector& start, Rng& schedule_rng,
                              const GunTrainConfig& cfg) {
    GunMeasure m;
    m.active_union = StateVector(dyn.net().n());
    dyn.set_activity_sink(&m.active_union);
    auto cycle = dyn.find_limit_cycle(start, InputAssignment::single(gun.input_node),
                                      cfg.cycle_max_steps);
    dyn.set_activity_sink(nullptr);
    if (!cycle) return m;
    m.cycle_found = true;
    m.period = cycle->period;
    m.fv = fitness(dyn, *cycle, layout);
    layout.phases = m.fv.phases;
    ShotProgress sp = measure_shot_progress(*cycle, layout, dyn.net());
    m.progress = sp.per_gun.empty() ? 0.0 : sp.per_gun[0];
    uint32_t phase = uint32_t(schedule_rng.uniform_u64(cycle->period));
    m.rest_ok = dyn.relaxes_to_rest(cycle->states[phase], cfg.rest_max_steps);
    m.cycle_state = cycle->states[0];
    return m;
}

}  // namespace detail

// Stage one: random local swaps around the input node, keeping a swap unless
// it moves the cycle period (from the all-zero state with the input pinned)
// further from the desired one. Success iff the desired period is reached.
inline bool tune_period(Network& net, RewireJournal& journal, const GunSpec& gun,
                        const GunTrainConfig& cfg, Rng& swap_rng, uint64_t* attempts_used = nullptr) {
    cfg.validate();
    gun.validate();
    if (!net.is_input[gun.input_node])
        throw std::invalid_argument("gun input node not designated as input");

    Dynamics dyn(net);
    const InputAssignment drive = InputAssignment::single(gun.input_node);
    const double max_len = max_rewire_length(gun.radius_D);
    const double radius = cfg.local_radius > 0.0 ? cfg.local_radius : gun.radius_D;
    const Vec2 center = net.pos[gun.input_node];

    auto period_distance = [&]() -> uint64_t {
        auto cycle = dyn.find_limit_cycle(dyn.zero_state(), drive, cfg.cycle_max_steps);
        if (!cycle) return std::numeric_limits<uint64_t>::max();
        return cycle->period > cfg.desired_period ? cycle->period - cfg.desired_period
                                                  : cfg.desired_period - cycle->period;
    };

    detail::CandidateCache cands;
    cands.rebuild(
        net, [&](uint32_t node) { return dist(net.pos[node], center) <= radius; },
        [](uint32_t) { return true; });

    uint64_t cur_dist = period_distance();
    uint64_t attempts = 0;
    while (cur_dist != 0 && attempts < cfg.period_budget) {
        ++attempts;
        auto swap = propose_swap_from(net, cands.slots, cands.source_ok, max_len, swap_rng,
                                      cfg.swap_attempt_budget);
        if (!swap) continue;
        apply_swap(net, journal, *swap);
        uint64_t new_dist = period_distance();
        if (new_dist > cur_dist)
            undo_last(net, journal, 1);
        else
            cur_dist = new_dist;
    }
    if (attempts_used) *attempts_used = attempts;
    return cur_dist == 0;
}

struct GunShapeResult {
    bool ok = false;  // final state passes period + rest checks
    uint64_t attempts = 0;
    uint64_t accepted = 0;
    double final_fitness = 0.0;
    double final_progress = 0.0;
    std::vector<GunTraceRow> trace;
};

// Stage two: randomized-activation hill climbing on the glider fitness.
// Each attempt settles with the input off, applies one swap inside the
// alternating disk/path window, re-measures under the pinned input, and
// undoes the swap unless the cycle is found with the desired period, the rest
// test passes, and the fitness did not drop.
inline GunShapeResult shape_glider(Network& net, RewireJournal& journal, const GunSpec& gun,
                                   const GunTrainConfig& cfg, Rng& swap_rng, Rng& schedule_rng) {
    cfg.validate();
    gun.validate();

    Dynamics dyn(net);
    RegionLayout layout = build_gun_layout(net, gun);
    const double max_len = max_rewire_length(gun.radius_D);
    const Vec2 input_pos = net.pos[gun.input_node];
    const Vec2 axis = gun.target - input_pos;

    GunShapeResult result;
    GunMeasure cache = detail::measure_gun(dyn, layout, gun, dyn.zero_state(), schedule_rng, cfg);
    if (!cache.cycle_found || cache.period != cfg.desired_period) return result;

    auto anchor_point = [&](double progress) { return input_pos + axis * progress; };

    detail::CandidateCache disk_cands, path_cands;
    auto rebuild_candidates = [&]() {
        Vec2 anchor = anchor_point(cache.progress);
        auto filter = [&](uint32_t node) { return cache.active_union.get(node); };
        disk_cands.rebuild(
            net, [&](uint32_t node) { return dist(net.pos[node], anchor) <= gun.radius_D; },
            filter);
        Stadium path{input_pos, anchor, gun.radius_D};
        path_cands.rebuild(net, [&](uint32_t node) { return path.contains(net.pos[node]); },
                           filter);
    };
    rebuild_candidates();

    StateVector cur = cache.cycle_state;
    bool path_mode = false;
    for (uint64_t attempt = 1; attempt <= cfg.shape_budget; ++attempt) {
        auto settled =
            dyn.settle_random_steps(cur, InputAssignment::all_off(), schedule_rng,
                                    cfg.cycle_max_steps);
        StateVector start = settled ? std::move(*settled) : dyn.zero_state();

        detail::CandidateCache& cands = path_mode ? path_cands : disk_cands;
        path_mode = !path_mode;
        auto swap = propose_swap_from(net, cands.slots, cands.source_ok, max_len, swap_rng,
                                      cfg.swap_attempt_budget);
        if (!swap) {
            result.trace.push_back({attempt, false, cache.fv.total, cache.period});
            ++result.attempts;
            continue;
        }
        apply_swap(net, journal, *swap);
        GunMeasure m = detail::measure_gun(dyn, layout, gun, start, schedule_rng, cfg);
        bool accept = m.ok(cfg.desired_period) && m.fv.total >= cache.fv.total;
        if (accept) {
            cache = std::move(m);
            cur = cache.cycle_state;
            rebuild_candidates();
            ++result.accepted;
        } else {
            undo_last(net, journal, 1);
            cur = cache.cycle_state;
        }
        result.trace.push_back(
            {attempt, accept, m.cycle_found ? m.fv.total : cache.fv.total,
             m.cycle_found ? m.period : 0});
        ++result.attempts;
    }
    result.ok = cache.ok(cfg.desired_period);
    result.final_fitness = cache.fv.total;
    result.final_progress = cache.progress;
    return result;
}

struct GunTrainResult {
    bool period_ok = false;
    bool shape_ok = false;
    uint64_t period_attempts = 0;
    GunShapeResult shape;
};

inline GunTrainResult train_gun(Network& net, RewireJournal& journal, const GunSpec& gun,
                                const GunTrainConfig& cfg, Rng& rng) {
    GunTrainResult result;
    Rng swap_rng = rng.child("swaps");
    Rng schedule_rng = rng.child("schedules");
    result.period_ok = tune_period(net, journal, gun, cfg, swap_rng, &result.period_attempts);
    if (!result.period_ok) return result;
    result.shape = shape_glider(net, journal, gun, cfg, swap_rng, schedule_rng);
    result.shape_ok = result.shape.ok;
    return result;
}

}  // namespace gg
