#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "glidergates/geometry.hpp"

namespace gg {

struct NetworkParams {
    uint32_t n_nodes = 2000;
    int threshold_h = 2;
    double target_mean_degree_k = 10.0;
    double target_clustering_c = 0.4;
    double excitatory_fraction = 0.5;
    uint64_t rng_seed = 0;

    void validate() const {
        if (n_nodes < 2) throw std::invalid_argument("n_nodes must be >= 2");
        if (threshold_h < 0) throw std::invalid_argument("threshold_h must be >= 0");
        if (!(target_mean_degree_k > 0.0) || !(target_mean_degree_k < double(n_nodes) - 1.0))
            throw std::invalid_argument("target_mean_degree_k must be in (0, n_nodes-1)");
        if (target_clustering_c < 0.0 || target_clustering_c > 1.0)
            throw std::invalid_argument("target_clustering_c must be in [0, 1]");
        if (excitatory_fraction < 0.0 || excitatory_fraction > 1.0)
            throw std::invalid_argument("excitatory_fraction must be in [0, 1]");
    }
};

// Distance-dependent wiring probability P(d) = min(1, K * exp(-lambda * d)).
struct ConnectionLaw {
    double amplitude_k = 1.0;
    double decay_lambda = 0.0;

    double probability(double d) const {
        return std::min(1.0, amplitude_k * std::exp(-decay_lambda * d));
    }

    void validate() const {
        if (!(amplitude_k > 0.0)) throw std::invalid_argument("amplitude_k must be > 0");
        if (decay_lambda < 0.0) throw std::invalid_argument("decay_lambda must be >= 0");
    }
};

// Directed threshold network embedded in the unit square. Out-adjacency is
// stored CSR-style; rewiring swaps entries of `out_dst` in place, so edge
// slots keep their source node for the lifetime of the network. Edge weights
// are not stored: every out-edge of node j carries sign(j) * 1, or
// sign(j) * (h+1) once j has been designated an input node.
struct Network {
    NetworkParams params;
    ConnectionLaw law;

    std::vector<Vec2> pos;
    std::vector<int8_t> sign;  // +1 excitatory, -1 inhibitory

    std::vector<uint32_t> out_offset;  // n+1
    std::vector<uint32_t> out_dst;     // mutable under rewiring
    std::vector<uint32_t> edge_src;    // fixed per slot

    std::vector<uint32_t> input_nodes;  // sorted
    std::vector<uint8_t> is_input;

    uint32_t n() const { return static_cast<uint32_t>(pos.size()); }
    int h() const { return params.threshold_h; }
    size_t edge_count() const { return out_dst.size(); }

    uint32_t out_begin(uint32_t j) const { return out_offset[j]; }
    uint32_t out_end(uint32_t j) const { return out_offset[j + 1]; }
    uint32_t out_degree(uint32_t j) const { return out_end(j) - out_begin(j); }

    // Weight carried by every out-edge of node j.
    int source_weight(uint32_t j) const {
        int mag = is_input[j] ? params.threshold_h + 1 : 1;
        return sign[j] * mag;
    }

    uint64_t pair_key(uint32_t src, uint32_t dst) const {
        return static_cast<uint64_t>(src) * n() + dst;
    }

    bool edge_exists(uint32_t src, uint32_t dst) const {
        return edge_set_.count(pair_key(src, dst)) != 0;
    }

    // Slot of edge (src -> dst); throws if absent.
    uint32_t find_slot(uint32_t src, uint32_t dst) const {
        for (uint32_t e = out_begin(src); e < out_end(src); ++e)
            if (out_dst[e] == dst) return e;
        throw std::invalid_argument("edge not present");
    }

    void designate_input(uint32_t node) {
        if (node >= n()) throw std::invalid_argument("unknown node id");
        if (is_input[node]) throw std::invalid_argument("node is already an input node");
        is_input[node] = 1;
        input_nodes.insert(std::lower_bound(input_nodes.begin(), input_nodes.end(), node), node);
    }

    // Assembles CSR from a per-source edge list; edges[j] must hold node j's
    // targets in their intended slot order.
    static Network assemble(NetworkParams params, ConnectionLaw law, std::vector<Vec2> positions,
                            std::vector<int8_t> signs,
                            const std::vector<std::vector<uint32_t>>& edges) {
        Network net;
        net.params = params;
        net.law = law;
        net.pos = std::move(positions);
        net.sign = std::move(signs);
        uint32_t n = net.n();
        net.is_input.assign(n, 0);
        net.out_offset.assign(n + 1, 0);
        size_t total = 0;
        for (uint32_t j = 0; j < n; ++j) {
            net.out_offset[j] = static_cast<uint32_t>(total);
            total += edges[j].size();
        }
        net.out_offset[n] = static_cast<uint32_t>(total);
        net.out_dst.reserve(total);
        net.edge_src.reserve(total);
        for (uint32_t j = 0; j < n; ++j) {
            for (uint32_t i : edges[j]) {
                net.out_dst.push_back(i);
                net.edge_src.push_back(j);
            }
        }
        net.rebuild_edge_set();
        net.check_structure();
        return net;
    }

    void rebuild_edge_set() {
        edge_set_.clear();
        edge_set_.reserve(out_dst.size() * 2);
        for (size_t e = 0; e < out_dst.size(); ++e) {
            if (!edge_set_.insert(pair_key(edge_src[e], out_dst[e])).second)
                throw std::invalid_argument("duplicate edge in network");
        }
    }

    void edge_set_erase(uint32_t src, uint32_t dst) { edge_set_.erase(pair_key(src, dst)); }
    void edge_set_insert(uint32_t src, uint32_t dst) { edge_set_.insert(pair_key(src, dst)); }

    // Structural invariants: coordinates in the unit square, no self-edges,
    // no duplicate ordered pairs (enforced by rebuild_edge_set).
    void check_structure() const {
        for (const Vec2& p : pos)
            if (!in_unit_square(p)) throw std::invalid_argument("node outside unit square");
        for (int8_t s : sign)
            if (s != 1 && s != -1) throw std::invalid_argument("node sign must be +1 or -1");
        for (size_t e = 0; e < out_dst.size(); ++e) {
            if (out_dst[e] >= n() || edge_src[e] >= n())
                throw std::invalid_argument("edge endpoint out of range");
            if (out_dst[e] == edge_src[e]) throw std::invalid_argument("self-edge");
        }
    }

    std::vector<uint32_t> in_degrees() const {
        std::vector<uint32_t> deg(n(), 0);
        for (uint32_t dst : out_dst) ++deg[dst];
        return deg;
    }

    std::vector<uint32_t> out_degrees() const {
        std::vector<uint32_t> deg(n(), 0);
        for (uint32_t j = 0; j < n(); ++j) deg[j] = out_degree(j);
        return deg;
    }

  private:
    std::unordered_set<uint64_t> edge_set_;
};

struct GraphStats {
    double mean_degree = 0.0;
    double clustering = 0.0;
};

// Mean degree counts each directed edge once; clustering is the mean local
// clustering coefficient of the undirected underlying graph (edge if either
// direction exists), with degree-<2 nodes contributing 0.
inline GraphStats measure_graph_stats(const Network& net) {
    uint32_t n = net.n();
    GraphStats stats;
    stats.mean_degree = n > 0 ? double(net.edge_count()) / double(n) : 0.0;

    std::vector<std::vector<uint32_t>> und(n);
    for (size_t e = 0; e < net.edge_count(); ++e) {
        uint32_t a = net.edge_src[e], b = net.out_dst[e];
        und[a].push_back(b);
        und[b].push_back(a);
    }
    for (auto& nb : und) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    double sum = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
        size_t deg = und[i].size();
        if (deg < 2) continue;
        size_t links = 0;
        for (uint32_t a : und[i]) {
            // count neighbors b of a with b in und[i] and b > a
            const auto& na = und[a];
            auto it = std::upper_bound(na.begin(), na.end(), a);
            auto jt = und[i].begin();
            while (it != na.end() && jt != und[i].end()) {
                if (*it < *jt)
                    ++it;
                else if (*jt < *it)
                    ++jt;
                else {
                    ++links;
                    ++it;
                    ++jt;
                }
            }
        }
        sum += 2.0 * double(links) / (double(deg) * double(deg - 1));
    }
    stats.clustering = n > 0 ? sum / double(n) : 0.0;
    return stats;
}

}  // namespace gg
