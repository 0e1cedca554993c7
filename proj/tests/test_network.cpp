#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "glidergates/generation.hpp"
#include "glidergates/io.hpp"
#include "glidergates/network.hpp"
#include "test_helpers.hpp"

using namespace gg;

namespace {

// Independent clustering oracle: adjacency matrix + direct triangle count.
double brute_clustering(const Network& net) {
    uint32_t n = net.n();
    std::vector<uint8_t> adj(size_t(n) * n, 0);
    for (size_t e = 0; e < net.edge_count(); ++e) {
        uint32_t a = net.edge_src[e], b = net.out_dst[e];
        adj[size_t(a) * n + b] = 1;
        adj[size_t(b) * n + a] = 1;
    }
    double sum = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
        std::vector<uint32_t> nb;
        for (uint32_t j = 0; j < n; ++j)
            if (adj[size_t(i) * n + j]) nb.push_back(j);
        if (nb.size() < 2) continue;
        size_t links = 0;
        for (size_t x = 0; x < nb.size(); ++x)
            for (size_t y = x + 1; y < nb.size(); ++y)
                if (adj[size_t(nb[x]) * n + nb[y]]) ++links;
        sum += 2.0 * double(links) / (double(nb.size()) * double(nb.size() - 1));
    }
    return sum / n;
}

}  // namespace

TEST_CASE("two-node network with clamped law wires both directions") {
    NetworkParams params;
    params.n_nodes = 2;
    params.target_mean_degree_k = 0.5;
    Rng rng(3);
    Network net = generate_network(params, ConnectionLaw{1.0, 0.0}, rng);
    REQUIRE(net.edge_count() == 2);
    REQUIRE(net.edge_exists(0, 1));
    REQUIRE(net.edge_exists(1, 0));
}

TEST_CASE("generation is deterministic and structurally sound") {
    NetworkParams params;
    params.n_nodes = 50;
    params.target_mean_degree_k = 6.0;
    params.rng_seed = 42;
    ConnectionLaw law{0.9, 3.0};

    Rng r1(42), r2(42);
    Network a = generate_network(params, law, r1);
    Network b = generate_network(params, law, r2);
    REQUIRE(network_to_text(a) == network_to_text(b));

    // no self-edges, no duplicate ordered pairs, degree bookkeeping exact
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (size_t e = 0; e < a.edge_count(); ++e) {
        REQUIRE(a.edge_src[e] != a.out_dst[e]);
        REQUIRE(seen.emplace(a.edge_src[e], a.out_dst[e]).second);
    }
    auto out_deg = a.out_degrees();
    size_t total = 0;
    for (uint32_t d : out_deg) total += d;
    REQUIRE(total == a.edge_count());
    REQUIRE(a.input_nodes.empty());
}

TEST_CASE("wiring probability never increases with distance") {
    ConnectionLaw law{2.5, 14.0};
    double prev = 1.0;
    for (double d = 0.0; d <= 1.5; d += 0.01) {
        double p = law.probability(d);
        REQUIRE(p <= prev + 1e-15);
        REQUIRE(p <= 1.0);
        prev = p;
    }
}

TEST_CASE("distance-independent wiring hits the target degree") {
    NetworkParams params;
    params.n_nodes = 2000;
    params.target_mean_degree_k = 10.0;
    ConnectionLaw law{10.0 / 1999.0, 0.0};
    double acc = 0.0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(1000 + s);
        Network net = generate_network(params, law, rng);
        acc += measure_graph_stats(net).mean_degree;
    }
    double mean = acc / seeds;
    REQUIRE(std::abs(mean - 10.0) / 10.0 < 0.02);
}

TEST_CASE("graph stats on degenerate graphs") {
    Network empty = ggtest::make_excitatory(1, {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}}, {});
    GraphStats se = measure_graph_stats(empty);
    REQUIRE(se.mean_degree == 0.0);
    REQUIRE(se.clustering == 0.0);

    std::vector<std::pair<uint32_t, uint32_t>> k4;
    for (uint32_t i = 0; i < 4; ++i)
        for (uint32_t j = 0; j < 4; ++j)
            if (i != j) k4.push_back({i, j});
    Network complete =
        ggtest::make_excitatory(1, {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}, {0.4, 0.4}}, k4);
    GraphStats sc = measure_graph_stats(complete);
    REQUIRE(sc.mean_degree == 3.0);
    REQUIRE(sc.clustering == 1.0);
}

TEST_CASE("uniform-wiring clustering matches the brute-force triangle count") {
    NetworkParams params;
    params.n_nodes = 500;
    params.target_mean_degree_k = 10.0;
    ConnectionLaw law{10.0 / 499.0, 0.0};
    Rng rng(7);
    Network net = generate_network(params, law, rng);
    GraphStats stats = measure_graph_stats(net);
    REQUIRE(stats.clustering == Catch::Approx(brute_clustering(net)).margin(1e-12));
    // Directed edges exist each way with p = k/(N-1); the undirected
    // underlying graph then has edge probability 1-(1-p)^2, which is also its
    // expected clustering.
    double p = 10.0 / 499.0;
    REQUIRE(stats.clustering == Catch::Approx(1.0 - (1.0 - p) * (1.0 - p)).margin(0.01));
}

TEST_CASE("designating an input node rescales exactly its out-edges") {
    // node 0 excitatory with 3 out-edges, node 1 inhibitory with 2
    Network net = ggtest::make_network(
        2, {{0.1, 0.1}, {0.2, 0.1}, {0.3, 0.1}, {0.4, 0.1}, {0.5, 0.1}}, {1, -1, 1, 1, 1},
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 4}, {2, 3}});
    REQUIRE(net.source_weight(0) == 1);

    Network before = net;
    net.designate_input(0);
    REQUIRE(net.source_weight(0) == 3);  // h+1 with sign preserved
    for (size_t e = 0; e < net.edge_count(); ++e) {
        REQUIRE(net.out_dst[e] == before.out_dst[e]);  // wiring untouched
        REQUIRE(net.edge_src[e] == before.edge_src[e]);
    }
    REQUIRE(net.source_weight(2) == 1);

    net.designate_input(1);
    REQUIRE(net.source_weight(1) == -3);  // inhibitory keeps its sign

    REQUIRE_THROWS_AS(net.designate_input(0), std::invalid_argument);
    REQUIRE_THROWS_AS(net.designate_input(99), std::invalid_argument);
}

TEST_CASE("invalid parameters are rejected") {
    NetworkParams params;
    params.n_nodes = 1;
    REQUIRE_THROWS_AS(params.validate(), std::invalid_argument);
    params.n_nodes = 10;
    params.target_mean_degree_k = 9.5;
    REQUIRE_THROWS_AS(params.validate(), std::invalid_argument);
    params.target_mean_degree_k = 4.0;
    params.excitatory_fraction = 1.5;
    REQUIRE_THROWS_AS(params.validate(), std::invalid_argument);
}
