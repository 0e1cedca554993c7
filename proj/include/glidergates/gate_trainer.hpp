#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "glidergates/evaluator.hpp"
#include "glidergates/gate_eval.hpp"
#include "glidergates/rewiring.hpp"

namespace gg {

// Spatial window for gate rewiring. Mode (a): disks of radius D at each
// gun's minimum-progress point. Mode (b): the swept glider path from the
// input up to that point. In corridor mode (common outputs, all shots close
// to the target) the pieces run from the target toward the output end.
struct WindowGeometry {
    bool path_mode = false;
    std::vector<Disk> disks;
    std::vector<Stadium> paths;

    bool contains(Vec2 p) const {
        if (path_mode) {
            for (const Stadium& s : paths)
                if (s.contains(p)) return true;
            return false;
        }
        for (const Disk& d : disks)
            if (d.contains(p)) return true;
        return false;
    }
};

// The single lowest normalized progress reached by any cannon shot across the
// latest per-pattern results. Mapping this one scalar onto every gun's axis
// keeps rewiring behind the slowest shot, so no shot gets far past the target
// while another still lags. Shots disregarded as close-enough contribute only
// as a fallback when nothing constrains; once everything is close enough on a
// common-output gate, the window moves onto the target-to-output corridor.
struct WindowSummary {
    double anchor_progress = 0.0;  // normalized by each gun's input-target distance
    bool corridor_mode = false;
    double corridor_anchor = 0.0;  // fraction of the target->output corridor

    bool operator==(const WindowSummary&) const = default;
};

inline WindowSummary summarize_progress(const GateSpec& gate,
                                        const std::vector<const PatternResult*>& latest) {
    WindowSummary s;
    double constrained_min = std::numeric_limits<double>::infinity();
    double fallback_min = std::numeric_limits<double>::infinity();
    for (const PatternResult* r : latest) {
        if (!r) continue;
        for (size_t g = 0; g < gate.num_guns(); ++g) {
            if (!gate.gun_active(r->pattern, g)) continue;
            double v = r->gun_progress[g];
            if (std::isnan(v)) continue;
            if (r->gun_constrained[g])
                constrained_min = std::min(constrained_min, v);
            else
                fallback_min = std::min(fallback_min, v);
        }
    }
    bool all_unconstrained = !std::isfinite(constrained_min) && std::isfinite(fallback_min);
    if (std::isfinite(constrained_min))
        s.anchor_progress = constrained_min;
    else if (std::isfinite(fallback_min))
        s.anchor_progress = fallback_min;

    if (gate.strategy == Strategy::Common && all_unconstrained) {
        s.corridor_mode = true;
        double min_frac = std::numeric_limits<double>::infinity();
        for (const PatternResult* r : latest) {
            if (!r || std::isnan(r->corridor_progress)) continue;
            min_frac = std::min(min_frac, r->corridor_progress);
        }
        s.corridor_anchor = std::isfinite(min_frac) ? min_frac : 0.0;
    }
    return s;
}

inline WindowGeometry window_geometry(const Network& net, const GateSpec& gate,
                                      const WindowSummary& s, bool path_mode) {
    WindowGeometry w;
    w.path_mode = path_mode;
    double radius = gate.guns.front().radius_D;
    if (s.corridor_mode) {
        Vec2 target = gate.guns.front().target;
        Vec2 out_end = gate.outputs.front().center;
        Vec2 anchor = target + (out_end - target) * s.corridor_anchor;
        w.disks.push_back({anchor, radius});
        w.paths.push_back({target, anchor, radius});
        return w;
    }
    for (size_t g = 0; g < gate.num_guns(); ++g) {
        Vec2 input_pos = net.pos[gate.guns[g].input_node];
        Vec2 anchor = input_pos + (gate.guns[g].target - input_pos) * s.anchor_progress;
        w.disks.push_back({anchor, gate.guns[g].radius_D});
        w.paths.push_back({input_pos, anchor, gate.guns[g].radius_D});
    }
    return w;
}

// Alternates between the anchor-disk window and the full-path window on
// every call.
class RewiringWindowState {
  public:
    WindowGeometry next(const Network& net, const GateSpec& gate,
                        const std::vector<const PatternResult*>& latest) {
        WindowGeometry w = window_geometry(net, gate, summarize_progress(gate, latest), path_mode_);
        path_mode_ = !path_mode_;
        return w;
    }

  private:
    bool path_mode_ = false;
};

struct GateTrainConfig {
    uint64_t budget = 100000;
    uint64_t eval_every = 0;     // 0 disables periodic error measurement
    uint32_t eval_trials = 100;  // trials per pattern for periodic checks
    double skip_factor = 0.25;   // "significantly lower" threshold
    uint32_t skip_limit = 100;   // consecutive skips triggering rollback
    uint32_t cycle_max_steps = kDefaultCycleMaxSteps;
    uint32_t rest_max_steps = kDefaultRestMaxSteps;
    int swap_attempt_budget = kSwapAttemptBudget;
    bool stop_at_zero_error = true;

    void validate() const {
        if (budget < 1) throw std::invalid_argument("budget must be >= 1");
        if (skip_factor < 0.0) throw std::invalid_argument("skip_factor must be >= 0");
        if (skip_limit < 1) throw std::invalid_argument("skip_limit must be >= 1");
    }
};

struct GateTraceRow {
    uint64_t attempt = 0;
    PatternMask pattern = 0;
    bool accepted = false;
    bool skipped = false;
    double fitness = 0.0;         // fitness observed this attempt
    double cached_fitness = 0.0;  // pre-swap baseline the attempt compared against
    uint64_t skips = 0;           // consecutive-skip counter after this attempt
    uint64_t undos = 0;           // cumulative rollback undos
};

struct GateTrainResult {
    uint64_t attempts = 0;
    uint64_t accepted = 0;
    uint64_t rollback_undos = 0;
    uint64_t proposals_none = 0;   // window produced no valid swap
    uint64_t unhealthy_posts = 0;  // post-swap evals failing period/rest/search
    std::vector<GateTraceRow> trace;
    std::vector<std::pair<uint64_t, double>> error_curve;  // (attempt, E)
    double best_error = std::numeric_limits<double>::infinity();
    uint64_t best_error_attempt = 0;
    bool reached_zero = false;
    Network best_net;
    RewireJournal best_journal;
    double final_total_fitness = 0.0;
};

// Full gate-training loop: per attempt, evaluate or reuse the current
// activation pattern, propose one swap whose sources were active during the
// last evaluation and whose targets lie inside the alternating progress
// window, and keep it only if that pattern's fitness strictly improved under
// a fresh randomized schedule. Wrong macro periods and failed rest tests on
// freshly selected patterns roll the journal back entry by entry; so do
// skip_limit consecutive pattern skips. Rollback never crosses the journal
// length at entry (the post-gun-training baseline).
inline GateTrainResult train_gate(Network& net, RewireJournal& journal, const GateSpec& gate,
                                  const GateTrainConfig& cfg, Rng& rng) {
    cfg.validate();
    gate.validate(net);

    Rng swap_rng = rng.child("swaps");
    Rng schedule_rng = rng.child("schedules");
    Rng eval_rng = rng.child("evaluation");

    const size_t baseline = journal.size();
    const std::vector<PatternMask> patterns = gate.patterns();
    const double max_len = max_rewire_length(gate.guns.front().radius_D);

    GateSession session(net, gate, cfg.cycle_max_steps, cfg.rest_max_steps);
    session.reset_to_rest();

    GateTrainResult result;
    std::vector<std::optional<PatternResult>> latest(patterns.size());
    auto latest_ptrs = [&]() {
        std::vector<const PatternResult*> ptrs;
        for (auto& r : latest) ptrs.push_back(r ? &*r : nullptr);
        return ptrs;
    };

    // The window summary and the source filter only change when a pattern is
    // (re-)evaluated on a kept network state, so the candidate sets for both
    // window modes are cached until then. A rejected swap restores the
    // network exactly, leaving the caches valid.
    bool path_mode = false;
    detail::CandidateCache disk_cands, path_cands;
    bool cands_dirty = true;

    auto eval_fresh = [&](size_t pidx) {
        session.drop_and_settle(schedule_rng);
        PatternResult r = session.evaluate_pattern(patterns[pidx], schedule_rng);
        latest[pidx] = std::move(r);
        return *latest[pidx];
    };

    auto record_error = [&](uint64_t attempt) {
        Rng trial_rng(eval_rng.next_u64());
        ErrorReport rep = measure_error_rate(net, gate, cfg.eval_trials, trial_rng);
        result.error_curve.emplace_back(attempt, rep.error_rate);
        if (rep.error_rate < result.best_error) {
            result.best_error = rep.error_rate;
            result.best_error_attempt = attempt;
            result.best_net = net;
            result.best_journal = journal;
        }
        return rep.error_rate;
    };

    size_t pidx = patterns.size() - 1;  // first advance lands on pattern 0
    bool need_new_pattern = true;
    bool have_prev = false;
    double prev_fitness = 0.0;
    uint64_t consecutive_skips = 0;
    PatternResult current;

    for (uint64_t attempt = 1; attempt <= cfg.budget; ++attempt) {
        if (need_new_pattern) {
            pidx = (pidx + 1) % patterns.size();
            PatternResult r = eval_fresh(pidx);

            // Restore a previously working state if the fresh pattern shows a
            // wrong macro period or fails the rest test.
            while (!r.healthy() && journal.size() > baseline) {
                undo_last(net, journal, 1);
                ++result.rollback_undos;
                cands_dirty = true;
                r = eval_fresh(pidx);
            }

            bool skip = have_prev &&
                        r.fitness.total < prev_fitness - cfg.skip_factor * std::fabs(prev_fitness);
            if (skip) {
                double ref = prev_fitness;
                prev_fitness = r.fitness.total;
                have_prev = true;
                ++consecutive_skips;
                if (consecutive_skips >= cfg.skip_limit) {
                    // Too many skips in a row: walk the journal back until
                    // this pattern clears the threshold (or the baseline).
                    while (journal.size() > baseline &&
                           r.fitness.total < ref - cfg.skip_factor * std::fabs(ref)) {
                        undo_last(net, journal, 1);
                        ++result.rollback_undos;
                        cands_dirty = true;
                        r = eval_fresh(pidx);
                    }
                    consecutive_skips = 0;
                    prev_fitness = r.fitness.total;
                    // fall through: train on this pattern now
                } else {
                    ++result.attempts;
                    result.trace.push_back({attempt, patterns[pidx], false, true, r.fitness.total,
                                            ref, consecutive_skips, result.rollback_undos});
                    continue;  // move on to the next pattern
                }
            } else {
                consecutive_skips = 0;
                prev_fitness = r.fitness.total;
                have_prev = true;
            }
            current = *latest[pidx];
            need_new_pattern = false;
            cands_dirty = true;
        }

        if (cands_dirty) {
            WindowSummary summary = summarize_progress(gate, latest_ptrs());
            auto filter = [&](uint32_t node) { return current.active_nodes.get(node); };
            WindowGeometry wd = window_geometry(net, gate, summary, false);
            WindowGeometry wp = window_geometry(net, gate, summary, true);
            disk_cands.rebuild(
                net, [&](uint32_t node) { return wd.contains(net.pos[node]); }, filter);
            path_cands.rebuild(
                net, [&](uint32_t node) { return wp.contains(net.pos[node]); }, filter);
            cands_dirty = false;
        }
        detail::CandidateCache& cands = path_mode ? path_cands : disk_cands;
        path_mode = !path_mode;

        auto swap = propose_swap_from(net, cands.slots, cands.source_ok, max_len, swap_rng,
                                      cfg.swap_attempt_budget);
        bool accepted = false;
        const double compare_base = current.fitness.total;
        double observed_fitness = compare_base;
        if (!swap) ++result.proposals_none;
        if (swap) {
            apply_swap(net, journal, *swap);
            PatternResult post = eval_fresh(pidx);
            observed_fitness = post.fitness.total;
            if (!post.healthy()) ++result.unhealthy_posts;
            if (post.healthy() && post.fitness.total > current.fitness.total) {
                accepted = true;
                current = *latest[pidx];
                prev_fitness = current.fitness.total;
                need_new_pattern = true;  // improving swap found: next pattern
                ++result.accepted;
                cands_dirty = true;
            } else {
                undo_last(net, journal, 1);
                latest[pidx] = current;  // the post-swap reading no longer applies
            }
        }
        ++result.attempts;
        result.trace.push_back({attempt, patterns[pidx], accepted, false, observed_fitness,
                                compare_base, consecutive_skips, result.rollback_undos});

        if (cfg.eval_every > 0 && attempt % cfg.eval_every == 0) {
            double e = record_error(attempt);
            if (e == 0.0 && cfg.stop_at_zero_error) {
                result.reached_zero = true;
                break;
            }
        }
    }

    if (cfg.eval_every > 0) {
        if (result.error_curve.empty() || result.error_curve.back().first != result.attempts)
            record_error(result.attempts);
        if (result.best_error == 0.0) result.reached_zero = true;
    } else {
        result.best_net = net;
        result.best_journal = journal;
    }
    std::vector<PatternResult> finals;
    Rng final_rng = rng.child("final-fitness");
    result.final_total_fitness = total_fitness(net, gate, final_rng, &finals);
    return result;
}

}  // namespace gg
