#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "glidergates/network.hpp"
#include "glidergates/rng.hpp"

namespace gg {

struct CalibrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Network generate_network(const NetworkParams& params, const ConnectionLaw& law, Rng& rng) {
    params.validate();
    law.validate();
    uint32_t n = params.n_nodes;

    std::vector<Vec2> positions(n);
    for (uint32_t i = 0; i < n; ++i) {
        positions[i].x = rng.uniform_real();
        positions[i].y = rng.uniform_real();
    }
    std::vector<int8_t> signs(n);
    for (uint32_t i = 0; i < n; ++i)
        signs[i] = rng.bernoulli(params.excitatory_fraction) ? int8_t{1} : int8_t{-1};

    std::vector<std::vector<uint32_t>> edges(n);
    for (uint32_t j = 0; j < n; ++j) {
        for (uint32_t i = 0; i < n; ++i) {
            if (i == j) continue;
            double p = law.probability(dist(positions[j], positions[i]));
            if (rng.bernoulli(p)) edges[j].push_back(i);
        }
    }
    return Network::assemble(params, law, std::move(positions), std::move(signs), edges);
}

// Expected out-degree of a node under the law, estimated over sampled
// point-pair distances.
inline double expected_degree(const ConnectionLaw& law, uint32_t n_nodes,
                              const std::vector<double>& pair_distances) {
    double acc = 0.0;
    for (double d : pair_distances) acc += law.probability(d);
    return (double(n_nodes) - 1.0) * acc / double(pair_distances.size());
}

// Amplitude K matching the target mean degree at a fixed decay, by bisection
// on the sampled-distance estimate. Always solvable: P saturates at 1.
inline double solve_amplitude(double decay_lambda, double k_target, uint32_t n_nodes,
                              const std::vector<double>& pair_distances) {
    double lo = 0.0, hi = 1.0;
    while (expected_degree({hi, decay_lambda}, n_nodes, pair_distances) < k_target) {
        hi *= 2.0;
        if (hi > 1e12) throw CalibrationFailure("amplitude search diverged");
    }
    for (int iter = 0; iter < 80; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (expected_degree({mid, decay_lambda}, n_nodes, pair_distances) < k_target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct CalibrationReport {
    ConnectionLaw law;
    double k_measured = 0.0;
    double c_measured = 0.0;
    int evaluations = 0;
};

// Finds (K, lambda) reproducing the target mean degree and clustering
// coefficient. Inner stage: bisection on K against k over sampled pair
// distances. Outer stage: bisection on lambda against the clustering measured
// on probe networks generated at full size (clustering grows with locality).
inline CalibrationReport calibrate_connection_law_full(const NetworkParams& params,
                                                       uint64_t samples, Rng& rng) {
    params.validate();
    if (samples < 10000) throw std::invalid_argument("calibration needs samples >= 10^4");

    const double k_target = params.target_mean_degree_k;
    const double c_target = params.target_clustering_c;
    const double k_rel_tol = 0.02;
    const double c_abs_tol = 0.02;

    Rng dist_rng = rng.child("pair-distances");
    std::vector<double> pair_distances(samples);
    for (double& d : pair_distances) {
        Vec2 a{dist_rng.uniform_real(), dist_rng.uniform_real()};
        Vec2 b{dist_rng.uniform_real(), dist_rng.uniform_real()};
        d = dist(a, b);
    }

    Rng probe_rng = rng.child("probe-networks");
    CalibrationReport report;
    auto measure_at = [&](double lambda) {
        ConnectionLaw law{solve_amplitude(lambda, k_target, params.n_nodes, pair_distances),
                          lambda};
        Rng probe(probe_rng.next_u64());
        Network net = generate_network(params, law, probe);
        GraphStats stats = measure_graph_stats(net);
        ++report.evaluations;
        return std::pair<ConnectionLaw, GraphStats>{law, stats};
    };

    // Bracket the target clustering.
    double lam_lo = 0.0;
    auto [law_lo, stats_lo] = measure_at(lam_lo);
    if (std::abs(stats_lo.clustering - c_target) <= c_abs_tol * 0.5) {
        report.law = law_lo;
        report.k_measured = stats_lo.mean_degree;
        report.c_measured = stats_lo.clustering;
        return report;
    }
    if (stats_lo.clustering > c_target)
        throw CalibrationFailure("target clustering below the distance-independent floor");

    const double lam_max = 512.0;
    double lam_hi = 8.0;
    GraphStats stats_hi;
    ConnectionLaw law_hi;
    for (;;) {
        auto [law, stats] = measure_at(lam_hi);
        law_hi = law;
        stats_hi = stats;
        if (stats.clustering >= c_target) break;
        lam_hi *= 2.0;
        if (lam_hi > lam_max)
            throw CalibrationFailure(
                "target clustering unreachable: best C = " + std::to_string(stats.clustering) +
                " at lambda = " + std::to_string(lam_hi / 2.0) + " (target " +
                std::to_string(c_target) + ")");
    }

    ConnectionLaw best_law = law_hi;
    GraphStats best = stats_hi;
    for (int iter = 0; iter < 24 && std::abs(best.clustering - c_target) > c_abs_tol * 0.5;
         ++iter) {
        double mid = 0.5 * (lam_lo + lam_hi);
        auto [law, stats] = measure_at(mid);
        if (std::abs(stats.clustering - c_target) < std::abs(best.clustering - c_target)) {
            best = stats;
            best_law = law;
        }
        if (stats.clustering < c_target)
            lam_lo = mid;
        else
            lam_hi = mid;
    }

    // Confirm on fresh probes.
    Rng confirm(probe_rng.next_u64());
    double k_acc = 0.0, c_acc = 0.0;
    const int confirm_probes = 2;
    for (int i = 0; i < confirm_probes; ++i) {
        Rng probe(confirm.next_u64());
        Network net = generate_network(params, best_law, probe);
        GraphStats stats = measure_graph_stats(net);
        k_acc += stats.mean_degree;
        c_acc += stats.clustering;
    }
    report.law = best_law;
    report.k_measured = k_acc / confirm_probes;
    report.c_measured = c_acc / confirm_probes;
    if (std::abs(report.k_measured - k_target) > k_rel_tol * k_target ||
        std::abs(report.c_measured - c_target) > c_abs_tol) {
        throw CalibrationFailure("calibration out of tolerance: k = " +
                                 std::to_string(report.k_measured) + " (target " +
                                 std::to_string(k_target) + "), C = " +
                                 std::to_string(report.c_measured) + " (target " +
                                 std::to_string(c_target) + ")");
    }
    return report;
}

inline ConnectionLaw calibrate_connection_law(const NetworkParams& params, uint64_t samples,
                                              Rng& rng) {
    return calibrate_connection_law_full(params, samples, rng).law;
}

}  // namespace gg
