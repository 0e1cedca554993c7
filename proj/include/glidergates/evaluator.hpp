#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "glidergates/gate_eval.hpp"

namespace gg {

// TRUE iff any node inside the readout disk is active in at least one cycle
// state. Transient activity before the cycle does not count.
inline bool read_output(const Network& net, const LimitCycle& cycle, const OutputSpec& out) {
    for (uint32_t i = 0; i < net.n(); ++i) {
        if (dist(net.pos[i], out.center) > out.readout_radius) continue;
        for (const StateVector& s : cycle.states)
            if (s.get(i)) return true;
    }
    return false;
}

struct TrialOutcome {
    PatternMask pattern = 0;
    std::vector<bool> outputs_observed;
    bool macro_period_ok = false;
    bool rest_ok = false;
    bool wrong_output = false;
    bool is_error = false;
};

struct PatternErrorStats {
    PatternMask pattern = 0;
    uint64_t trials = 0;
    uint64_t wrong_output = 0;
    uint64_t wrong_period = 0;
    uint64_t no_rest = 0;
    uint64_t errors = 0;
    double error_rate() const { return trials ? double(errors) / double(trials) : 0.0; }
};

struct ErrorReport {
    std::vector<PatternErrorStats> per_pattern;
    uint64_t trials_total = 0;
    uint64_t errors_total = 0;
    double error_rate = 0.0;
};

inline TrialOutcome run_trial(GateSession& session, PatternMask pattern, Rng& rng,
                              bool certify_all_phases) {
    PatternResult r = session.evaluate_pattern(pattern, rng);
    TrialOutcome t;
    t.pattern = pattern;
    t.outputs_observed = session.read_outputs();
    t.macro_period_ok = r.macro_period_ok;
    t.rest_ok = r.rest_ok;
    if (certify_all_phases && t.rest_ok) t.rest_ok = session.rest_from_all_phases();
    const std::vector<bool>& want = session.gate().desired(pattern);
    for (size_t o = 0; o < want.size(); ++o)
        if (t.outputs_observed[o] != want[o]) t.wrong_output = true;
    t.is_error = t.wrong_output || !t.macro_period_ok || !t.rest_ok;
    return t;
}

// Error rate over randomized trials: every non-empty pattern is used equally
// often; a trial errs on a wrong output, a wrong macro period, or a failed
// rest test. Certification mode additionally requires relaxation from every
// cycle phase.
inline ErrorReport measure_error_rate(Network& net, const GateSpec& gate,
                                      uint32_t trials_per_pattern, Rng& rng,
                                      bool certify_all_phases = false) {
    if (trials_per_pattern < 1) throw std::invalid_argument("trials_per_pattern must be >= 1");
    GateSession session(net, gate);
    session.reset_to_rest();
    ErrorReport report;
    for (PatternMask m : gate.patterns()) {
        PatternErrorStats stats;
        stats.pattern = m;
        for (uint32_t trial = 0; trial < trials_per_pattern; ++trial) {
            TrialOutcome t = run_trial(session, m, rng, certify_all_phases);
            ++stats.trials;
            if (t.wrong_output) ++stats.wrong_output;
            if (!t.macro_period_ok) ++stats.wrong_period;
            if (!t.rest_ok) ++stats.no_rest;
            if (t.is_error) ++stats.errors;
            session.drop_and_settle(rng);
        }
        report.per_pattern.push_back(stats);
        report.trials_total += stats.trials;
        report.errors_total += stats.errors;
    }
    report.error_rate =
        report.trials_total ? double(report.errors_total) / double(report.trials_total) : 0.0;
    return report;
}

}  // namespace gg
