#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "glidergates/geometry.hpp"
#include "glidergates/network.hpp"

namespace gg {

inline constexpr uint32_t kDefaultTravelSteps = 10;
inline constexpr double kDefaultRadiusD = 0.07;

// New connections formed by rewiring may not exceed 3 * D.
inline double max_rewire_length(double radius_d) { return 3.0 * radius_d; }

inline bool is_prime(uint32_t p) {
    if (p < 2) return false;
    for (uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// One glider gun: a pinned input node whose emitted activity travels to the
// target point in T steps as a disk of radius D, repeating with period p.
struct GunSpec {
    uint32_t input_node = 0;
    Vec2 target;
    uint32_t period_p = 7;
    uint32_t travel_steps_T = kDefaultTravelSteps;
    double radius_D = kDefaultRadiusD;

    void validate() const {
        if (!is_prime(period_p)) throw std::invalid_argument("gun period must be prime");
        if (travel_steps_T < 1) throw std::invalid_argument("travel_steps_T must be >= 1");
        if (!(radius_D > 0.0 && radius_D < 0.5))
            throw std::invalid_argument("radius_D must be in (0, 0.5)");
        if (!in_unit_square(target)) throw std::invalid_argument("target outside unit square");
    }
};

enum class OutputKind { PerInput, Common };

struct OutputSpec {
    OutputKind kind = OutputKind::PerInput;
    Vec2 center;
    double readout_radius = kDefaultRadiusD;
};

// Shots aimed TRUE overshoot the target by this fraction of the input-target
// distance; the per-input readout disk sits at the resulting terminus.
inline constexpr double kOvershootFraction = 0.5;

inline Vec2 per_input_terminus(Vec2 input_pos, Vec2 target) {
    return input_pos + (target - input_pos) * (1.0 + kOvershootFraction);
}

inline OutputSpec default_per_input_output(const Network& net, const GunSpec& gun) {
    return {OutputKind::PerInput, per_input_terminus(net.pos[gun.input_node], gun.target),
            gun.radius_D};
}

// Common output center: 2D beyond the target along the bisector of the
// incoming gun directions.
inline OutputSpec default_common_output(const Network& net, const std::vector<GunSpec>& guns) {
    Vec2 axis{0.0, 0.0};
    for (const GunSpec& g : guns) axis = axis + normalized(g.target - net.pos[g.input_node]);
    Vec2 dir = normalized(axis);
    if (dir == Vec2{0.0, 0.0})
        throw std::invalid_argument("common output undefined for opposed guns");
    double d = guns.empty() ? kDefaultRadiusD : guns.front().radius_D;
    return {OutputKind::Common, guns.front().target + dir * (2.0 * d), d};
}

enum class Strategy { PerInput, Common };

// Bit g set = gun g active.
using PatternMask = uint32_t;

struct GateSpec {
    Strategy strategy = Strategy::PerInput;
    std::vector<GunSpec> guns;          // all share one target
    std::vector<OutputSpec> outputs;    // one per gun, or a single common one
    std::map<PatternMask, std::vector<bool>> truth_table;  // keyed by non-empty pattern

    size_t num_guns() const { return guns.size(); }
    size_t num_outputs() const { return strategy == Strategy::PerInput ? guns.size() : 1; }

    std::vector<PatternMask> patterns() const {
        std::vector<PatternMask> out;
        for (PatternMask m = 1; m < (PatternMask{1} << guns.size()); ++m) out.push_back(m);
        return out;
    }

    bool gun_active(PatternMask pattern, size_t g) const { return (pattern >> g) & 1; }

    uint64_t macro_period(PatternMask pattern) const {
        uint64_t p = 1;
        for (size_t g = 0; g < guns.size(); ++g)
            if (gun_active(pattern, g)) p *= guns[g].period_p;
        return p;
    }

    const std::vector<bool>& desired(PatternMask pattern) const {
        auto it = truth_table.find(pattern);
        if (it == truth_table.end()) throw std::invalid_argument("pattern missing in truth table");
        return it->second;
    }

    void validate(const Network& net) const {
        if (guns.empty()) throw std::invalid_argument("gate needs at least one gun");
        if (guns.size() > 16) throw std::invalid_argument("too many guns");
        for (const GunSpec& g : guns) {
            g.validate();
            if (g.input_node >= net.n()) throw std::invalid_argument("gun input node unknown");
            if (!net.is_input[g.input_node])
                throw std::invalid_argument("gun input node not designated as input");
        }
        for (size_t a = 0; a < guns.size(); ++a) {
            for (size_t b = a + 1; b < guns.size(); ++b) {
                if (guns[a].period_p == guns[b].period_p)
                    throw std::invalid_argument("gun periods must be pairwise distinct primes");
                if (guns[a].input_node == guns[b].input_node)
                    throw std::invalid_argument("guns must use distinct input nodes");
            }
            if (dist(guns[a].target, guns[0].target) > 1e-12)
                throw std::invalid_argument("guns must share one target point");
        }
        if (outputs.size() != num_outputs())
            throw std::invalid_argument("output count does not match strategy");
        if (strategy == Strategy::Common && outputs.front().kind != OutputKind::Common)
            throw std::invalid_argument("common strategy requires a common output");
        if (strategy == Strategy::PerInput) {
            for (const OutputSpec& o : outputs)
                if (o.kind != OutputKind::PerInput)
                    throw std::invalid_argument("per-input strategy requires per-input outputs");
        }
        for (PatternMask m : patterns()) {
            const std::vector<bool>& want = desired(m);
            if (want.size() != num_outputs())
                throw std::invalid_argument("truth-table row width does not match outputs");
            if (strategy == Strategy::PerInput) {
                // Output g can only be driven by gun g's own glider.
                for (size_t g = 0; g < guns.size(); ++g)
                    if (want[g] && !gun_active(m, g))
                        throw std::invalid_argument(
                            "per-input output cannot be TRUE while its gun is inactive");
            }
        }
    }
};

}  // namespace gg
