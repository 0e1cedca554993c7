#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "glidergates/dynamics.hpp"
#include "glidergates/gate_spec.hpp"
#include "glidergates/geometry.hpp"
#include "glidergates/network.hpp"

namespace gg {

enum class Region : uint8_t { I, II, III };

enum class ShotTerminus : uint8_t {
    Target,    // shot stops at the target point (age 0..T)
    Extended,  // shot continues to the overshoot terminus (age 0..(1+f)*T)
};

struct ShotDisk {
    Vec2 center;
    uint32_t age = 0;
};

// Moving-shot geometry of one active gun within a layout, with a per-node
// cache of the ages at which each node lies inside the shot disk.
struct GunShots {
    GunSpec gun;
    Vec2 input_pos;
    ShotTerminus terminus = ShotTerminus::Extended;
    uint32_t life = 0;  // maximum shot age, inclusive
    Vec2 end_point;

    std::vector<uint32_t> age_offset;  // n+1
    std::vector<uint8_t> ages;

    Vec2 center_at(uint32_t age) const {
        double f = double(age) / double(gun.travel_steps_T);
        return input_pos + (gun.target - input_pos) * f;
    }

    // Does a shot of age `a` exist at time t under the emission phase?
    // Steady-state layouts treat emissions as extending arbitrarily far back;
    // physical layouts only admit emissions at t0 >= 0.
    bool shot_alive(int64_t t, uint32_t a, uint32_t phase, bool steady) const {
        int64_t t0 = t - int64_t(a);
        if (!steady && t0 < 0) return false;
        int64_t p = gun.period_p;
        return ((t0 - int64_t(phase)) % p + p) % p == 0;
    }

    template <typename Fn>
    void for_each_node_age(uint32_t node, Fn&& fn) const {
        for (uint32_t k = age_offset[node]; k < age_offset[node + 1]; ++k) fn(ages[k]);
    }
};

// Disk centers of all shots of one gun in flight at time t.
inline std::vector<ShotDisk> shot_disks(const GunShots& g, uint32_t phase, int64_t t,
                                        bool steady = false) {
    std::vector<ShotDisk> out;
    for (uint32_t a = 0; a <= g.life; ++a)
        if (g.shot_alive(t, a, phase, steady)) out.push_back({g.center_at(a), a});
    return out;
}

// Time-dependent spatial classification for one input pattern.
//
// Precedence, highest first:
//   static region II (corridor + common readout, TRUE common outputs)
//   region III target zone
//   moving shot disks (region II)
//   region III input zones (every gun, active or not)
//   static region I (corridor fixed to I, FALSE common outputs)
//   region I (everything else)
// Moving shots sit above the input zones (a shot disk overlapping an input
// zone counts as region II) but below the target zone, which absorbs
// terminated shots.
struct RegionLayout {
    std::vector<GunShots> active_guns;

    std::vector<Disk> input_zones;  // one per gun of the gate, active or not
    std::optional<Disk> target_zone;
    std::vector<Stadium> static2_areas;
    std::vector<Disk> static2_disks;
    std::vector<Stadium> static1_areas;
    std::vector<Disk> static1_disks;

    // Per-node masks against the static geometry.
    std::vector<uint8_t> node_static2;
    std::vector<uint8_t> node_target3;
    std::vector<uint8_t> node_input3;
    std::vector<uint8_t> node_static1;

    // Emission phase per active gun; set by fitness(), used by classify().
    std::vector<uint32_t> phases;

    bool steady_state = true;

    bool in_static2(Vec2 p) const {
        for (const Disk& d : static2_disks)
            if (d.contains(p)) return true;
        for (const Stadium& s : static2_areas)
            if (s.contains(p)) return true;
        return false;
    }

    bool in_static1(Vec2 p) const {
        for (const Disk& d : static1_disks)
            if (d.contains(p)) return true;
        for (const Stadium& s : static1_areas)
            if (s.contains(p)) return true;
        return false;
    }

    bool in_input_zone(Vec2 p) const {
        for (const Disk& d : input_zones)
            if (d.contains(p)) return true;
        return false;
    }

    bool in_moving_shot(Vec2 p, int64_t t) const {
        for (size_t g = 0; g < active_guns.size(); ++g) {
            const GunShots& gs = active_guns[g];
            for (uint32_t a = 0; a <= gs.life; ++a) {
                if (!gs.shot_alive(t, a, phases[g], steady_state)) continue;
                if (dist(p, gs.center_at(a)) <= gs.gun.radius_D) return true;
            }
        }
        return false;
    }
};

inline Region classify(Vec2 point, int64_t t, const RegionLayout& layout) {
    if (layout.in_static2(point)) return Region::II;
    if (layout.target_zone && layout.target_zone->contains(point)) return Region::III;
    if (layout.in_moving_shot(point, t)) return Region::II;
    if (layout.in_input_zone(point)) return Region::III;
    return Region::I;  // includes the statically fixed region-I areas
}

namespace detail {

inline GunShots make_gun_shots(const Network& net, const GunSpec& gun, ShotTerminus terminus) {
    GunShots gs;
    gs.gun = gun;
    gs.input_pos = net.pos[gun.input_node];
    gs.terminus = terminus;
    double f = terminus == ShotTerminus::Target ? 1.0 : 1.0 + kOvershootFraction;
    gs.life = static_cast<uint32_t>(std::floor(f * double(gun.travel_steps_T) + 1e-9));
    gs.end_point = gs.input_pos + (gun.target - gs.input_pos) * f;

    uint32_t n = net.n();
    gs.age_offset.assign(n + 1, 0);
    std::vector<std::vector<uint8_t>> per_node(n);
    for (uint32_t a = 0; a <= gs.life; ++a) {
        Vec2 c = gs.center_at(a);
        for (uint32_t i = 0; i < n; ++i)
            if (dist(net.pos[i], c) <= gun.radius_D) per_node[i].push_back(uint8_t(a));
    }
    size_t total = 0;
    for (uint32_t i = 0; i < n; ++i) {
        gs.age_offset[i] = static_cast<uint32_t>(total);
        total += per_node[i].size();
    }
    gs.age_offset[n] = static_cast<uint32_t>(total);
    gs.ages.reserve(total);
    for (uint32_t i = 0; i < n; ++i)
        gs.ages.insert(gs.ages.end(), per_node[i].begin(), per_node[i].end());
    return gs;
}

inline void fill_node_masks(const Network& net, RegionLayout& layout) {
    uint32_t n = net.n();
    layout.node_static2.assign(n, 0);
    layout.node_target3.assign(n, 0);
    layout.node_input3.assign(n, 0);
    layout.node_static1.assign(n, 0);
    for (uint32_t i = 0; i < n; ++i) {
        Vec2 p = net.pos[i];
        if (layout.in_static2(p)) layout.node_static2[i] = 1;
        if (layout.target_zone && layout.target_zone->contains(p)) layout.node_target3[i] = 1;
        if (layout.in_input_zone(p)) layout.node_input3[i] = 1;
        if (layout.in_static1(p)) layout.node_static1[i] = 1;
    }
}

}  // namespace detail

// Layout for shaping a single gun: the input-node zone plus extended moving
// shots. No target zone and no static areas; those belong to gates.
inline RegionLayout build_gun_layout(const Network& net, const GunSpec& gun) {
    gun.validate();
    RegionLayout layout;
    layout.input_zones.push_back({net.pos[gun.input_node], gun.radius_D});
    layout.active_guns.push_back(detail::make_gun_shots(net, gun, ShotTerminus::Extended));
    layout.phases.assign(1, 0);
    detail::fill_node_masks(net, layout);
    return layout;
}

// Layout for one input pattern of a gate.
//   - III disks at every input node and at the target.
//   - Moving shots per active gun: extended to the per-input terminus when
//     that gun's output must be TRUE (per-input strategy), terminated at the
//     target otherwise (FALSE, undefined, or common strategy).
//   - Common strategy: corridor + readout disk statically region II when the
//     output must be TRUE, statically region I when it must be FALSE.
inline RegionLayout build_layout(const Network& net, const GateSpec& gate, PatternMask pattern) {
    gate.validate(net);
    if (pattern == 0 || pattern >= (PatternMask{1} << gate.guns.size()))
        throw std::invalid_argument("pattern out of range");

    RegionLayout layout;
    for (const GunSpec& g : gate.guns)
        layout.input_zones.push_back({net.pos[g.input_node], g.radius_D});
    layout.target_zone = Disk{gate.guns.front().target, gate.guns.front().radius_D};

    const std::vector<bool>& want = gate.desired(pattern);
    for (size_t g = 0; g < gate.guns.size(); ++g) {
        if (!gate.gun_active(pattern, g)) continue;
        ShotTerminus term = ShotTerminus::Target;
        if (gate.strategy == Strategy::PerInput && want[g]) term = ShotTerminus::Extended;
        layout.active_guns.push_back(detail::make_gun_shots(net, gate.guns[g], term));
    }
    layout.phases.assign(layout.active_guns.size(), 0);

    if (gate.strategy == Strategy::Common) {
        const OutputSpec& out = gate.outputs.front();
        Vec2 target = gate.guns.front().target;
        double d = gate.guns.front().radius_D;
        Stadium corridor{target, out.center, d * 0.5};
        Disk readout{out.center, out.readout_radius};
        if (want.front()) {
            layout.static2_areas.push_back(corridor);
            layout.static2_disks.push_back(readout);
        } else {
            layout.static1_areas.push_back(corridor);
            layout.static1_disks.push_back(readout);
        }
    }

    detail::fill_node_masks(net, layout);
    return layout;
}

struct FitnessValue {
    double total = 0.0;
    double region1_penalty = 0.0;  // <= 0
    double region2_reward = 0.0;   // >= 0
    uint32_t cycle_length = 0;
    std::vector<uint32_t> phases;  // per active gun
};

namespace detail {

// Is node i inside any moving shot disk at cycle time k under the phases?
inline bool node_in_moving(const RegionLayout& layout, const std::vector<uint32_t>& phases,
                           uint32_t i, int64_t k) {
    for (size_t g = 0; g < layout.active_guns.size(); ++g) {
        const GunShots& gs = layout.active_guns[g];
        bool hit = false;
        gs.for_each_node_age(i, [&](uint8_t a) {
            if (!hit && gs.shot_alive(k, a, phases[g], layout.steady_state)) hit = true;
        });
        if (hit) return true;
    }
    return false;
}

}  // namespace detail

// Fitness over one limit cycle under a fixed phase assignment: per state and
// node, min(h - S, 0) in region I, max(S - (h+1), 0) in region II, 0 in
// region III; summed and divided by the cycle length.
inline FitnessValue fitness_with_phases(Dynamics& dyn, const LimitCycle& cycle,
                                        const RegionLayout& layout,
                                        const std::vector<uint32_t>& phases) {
    if (phases.size() != layout.active_guns.size())
        throw std::invalid_argument("phase count does not match active guns");
    const Network& net = dyn.net();
    const int h = net.h();
    FitnessValue fv;
    fv.cycle_length = cycle.period;
    fv.phases = phases;
    for (uint32_t k = 0; k < cycle.period; ++k) {
        dyn.for_each_driven(cycle.states[k], [&](uint32_t i, int32_t s) {
            if (s <= h) return;
            if (layout.node_static2[i]) {
                fv.region2_reward += double(s - (h + 1));
                return;
            }
            if (layout.node_target3[i]) return;
            if (detail::node_in_moving(layout, phases, i, k)) {
                fv.region2_reward += double(s - (h + 1));
                return;
            }
            if (layout.node_input3[i]) return;
            fv.region1_penalty += double(h - s);
        });
    }
    fv.total = (fv.region1_penalty + fv.region2_reward) / double(cycle.period);
    return fv;
}

// Per-gun region-II contribution as a function of the emission phase. Only
// nodes below the static-II/target-zone precedence can contribute.
inline std::vector<std::vector<double>> phase_contributions(Dynamics& dyn,
                                                            const LimitCycle& cycle,
                                                            const RegionLayout& layout) {
    const Network& net = dyn.net();
    const int h = net.h();
    std::vector<std::vector<double>> contrib(layout.active_guns.size());
    for (size_t g = 0; g < layout.active_guns.size(); ++g)
        contrib[g].assign(layout.active_guns[g].gun.period_p, 0.0);

    for (uint32_t k = 0; k < cycle.period; ++k) {
        dyn.for_each_driven(cycle.states[k], [&](uint32_t i, int32_t s) {
            if (s <= h + 1) return;
            if (layout.node_static2[i] || layout.node_target3[i]) return;
            double gain = double(s - (h + 1));
            for (size_t g = 0; g < layout.active_guns.size(); ++g) {
                const GunShots& gs = layout.active_guns[g];
                uint32_t p = gs.gun.period_p;
                uint32_t seen = 0;  // phase dedup for overlapping same-gun disks
                gs.for_each_node_age(i, [&](uint8_t a) {
                    uint32_t phi = uint32_t((int64_t(k) - a) % p + p) % p;
                    if (seen & (uint32_t{1} << phi)) return;
                    seen |= uint32_t{1} << phi;
                    contrib[g][phi] += gain;
                });
            }
        });
    }
    return contrib;
}

// Fitness with each gun's phase chosen independently to maximize that gun's
// region-II contribution (smallest phase wins ties).
inline FitnessValue fitness(Dynamics& dyn, const LimitCycle& cycle, const RegionLayout& layout) {
    std::vector<std::vector<double>> contrib = phase_contributions(dyn, cycle, layout);
    std::vector<uint32_t> phases(layout.active_guns.size(), 0);
    for (size_t g = 0; g < contrib.size(); ++g) {
        uint32_t best = 0;
        for (uint32_t phi = 1; phi < contrib[g].size(); ++phi)
            if (contrib[g][phi] > contrib[g][best]) best = phi;
        phases[g] = best;
    }
    return fitness_with_phases(dyn, cycle, layout, phases);
}

// How far each gun's slowest shot gets, and how far corridor activity
// reaches, over one limit cycle.
struct ShotProgress {
    // Normalized by the input-target distance; may exceed 1 for extended
    // shots. One entry per active gun.
    std::vector<double> per_gun;
    // False when every shot of a terminated gun got within D of the target
    // (such shots no longer constrain rewiring).
    std::vector<uint8_t> constrained;
    // Fraction of the target-to-output corridor reached by activity; NaN when
    // the layout has no static-II corridor.
    double corridor = std::numeric_limits<double>::quiet_NaN();
};

inline ShotProgress measure_shot_progress(const LimitCycle& cycle, const RegionLayout& layout,
                                          const Network& net) {
    size_t n_guns = layout.active_guns.size();
    ShotProgress out;
    out.per_gun.assign(n_guns, 0.0);
    out.constrained.assign(n_guns, 1);

    uint32_t period = cycle.period;
    for (size_t g = 0; g < n_guns; ++g) {
        const GunShots& gs = layout.active_guns[g];
        uint32_t p = gs.gun.period_p;
        uint32_t phase = layout.phases[g] % p;
        if (period == 0 || period % p != 0) continue;  // undefined; anchor at the input
        uint32_t n_em = period / p;
        std::vector<int32_t> reach(n_em, -1);
        for (uint32_t k = 0; k < period; ++k) {
            cycle.states[k].for_each_set([&](uint32_t i) {
                gs.for_each_node_age(i, [&](uint8_t a) {
                    uint32_t t0 = uint32_t((int64_t(k) - a) % int64_t(period) + period) % period;
                    if (t0 % p != phase) return;
                    uint32_t em = (t0 - phase) / p;
                    reach[em] = std::max(reach[em], int32_t(a));
                });
            });
        }
        double d_total = dist(gs.input_pos, gs.gun.target);
        double close_frac = d_total > 0.0 ? 1.0 - gs.gun.radius_D / d_total : 0.0;
        double min_prog = std::numeric_limits<double>::infinity();
        bool any = false;
        for (int32_t r : reach) {
            double prog = r < 0 ? 0.0 : double(r) / double(gs.gun.travel_steps_T);
            if (gs.terminus == ShotTerminus::Target && prog >= close_frac)
                continue;  // close enough to the target: disregarded
            any = true;
            min_prog = std::min(min_prog, prog);
        }
        if (!any) {
            out.constrained[g] = 0;
            out.per_gun[g] = close_frac;
        } else {
            out.per_gun[g] = min_prog;
        }
    }

    if (!layout.static2_areas.empty()) {
        const Stadium& corridor = layout.static2_areas.front();
        double reach = 0.0;
        std::vector<std::pair<uint32_t, double>> corridor_nodes;
        for (uint32_t i = 0; i < net.n(); ++i)
            if (corridor.contains(net.pos[i]))
                corridor_nodes.emplace_back(i, segment_fraction(net.pos[i], corridor.a, corridor.b));
        for (uint32_t k = 0; k < period; ++k)
            for (auto [i, frac] : corridor_nodes)
                if (cycle.states[k].get(i)) reach = std::max(reach, frac);
        out.corridor = reach;
    }
    return out;
}

}  // namespace gg
