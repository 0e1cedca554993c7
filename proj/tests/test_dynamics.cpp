#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "glidergates/dynamics.hpp"
#include "glidergates/generation.hpp"
#include "test_helpers.hpp"

using namespace gg;

TEST_CASE("all-zero state with inputs off stays all-zero") {
    Network net = ggtest::make_excitatory(0, {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}},
                                          {{0, 1}, {1, 2}, {2, 0}});
    Dynamics dyn(net);
    StateVector s = dyn.zero_state();
    for (int t = 0; t < 20; ++t) {
        s = dyn.step(s, InputAssignment::all_off());
        REQUIRE(s.is_zero());
    }
}

TEST_CASE("threshold rule: three unit excitatory inputs beat h=2") {
    // nodes 0..2 feed node 3; node 4 is an inhibitory neighbor of 3
    Network net = ggtest::make_network(
        2, {{0.1, 0.1}, {0.2, 0.1}, {0.3, 0.1}, {0.2, 0.2}, {0.3, 0.2}}, {1, 1, 1, 1, -1},
        {{0, 3}, {1, 3}, {2, 3}, {4, 3}});
    Dynamics dyn(net);

    StateVector s = dyn.zero_state();
    s.set(0);
    s.set(1);
    s.set(2);
    StateVector next = dyn.step(s, InputAssignment::all_off());
    REQUIRE(next.get(3));  // S = 3 > 2

    s.set(4);  // inhibitor active: S = 2, not above threshold
    next = dyn.step(s, InputAssignment::all_off());
    REQUIRE(!next.get(3));
}

TEST_CASE("a pinned input node activates neighbors on its own") {
    // input node 0 -> node 1; inhibitory node 2 -> node 1
    Network net = ggtest::make_network(2, {{0.1, 0.1}, {0.2, 0.1}, {0.3, 0.1}}, {1, 1, -1},
                                       {{0, 1}, {2, 1}});
    net.designate_input(0);
    Dynamics dyn(net);

    StateVector s = dyn.zero_state();
    dyn.apply_inputs(s, InputAssignment::single(0));
    StateVector next = dyn.step(s, InputAssignment::single(0));
    REQUIRE(next.get(1));  // S = h+1 = 3 > 2
    REQUIRE(next.get(0));  // input stays pinned

    s.set(2);  // one extra inhibitory neighbor: S = 2, stays off
    next = dyn.step(s, InputAssignment::single(0));
    REQUIRE(!next.get(1));

    // pinned-off input nodes are forced to 0 even when driven
    StateVector forced = dyn.zero_state();
    forced.set(0);
    StateVector after = dyn.step(forced, InputAssignment::all_off());
    REQUIRE(!after.get(0));
}

TEST_CASE("all-zero start with inputs off is a period-1 fixed point") {
    Network net = ggtest::make_excitatory(1, {{0.1, 0.1}, {0.2, 0.2}}, {{0, 1}, {1, 0}});
    auto cycle = find_limit_cycle(net, StateVector(net.n()), InputAssignment::all_off(), 100);
    REQUIRE(cycle);
    REQUIRE(cycle->period == 1);
    REQUIRE(cycle->transient_length == 0);
    REQUIRE(cycle->states[0].is_zero());
}

TEST_CASE("three-node excitatory ring rotates with period 3") {
    Network net = ggtest::make_excitatory(0, {{0.1, 0.1}, {0.2, 0.1}, {0.15, 0.2}},
                                          {{0, 1}, {1, 2}, {2, 0}});
    StateVector start(net.n());
    start.set(0);
    auto cycle = find_limit_cycle(net, start, InputAssignment::all_off(), 100);
    REQUIRE(cycle);
    REQUIRE(cycle->period == 3);
    REQUIRE(cycle->transient_length == 0);

    // brute force over all 8 states agrees
    for (uint32_t bits = 0; bits < 8; ++bits) {
        StateVector s(net.n());
        for (uint32_t i = 0; i < 3; ++i)
            if ((bits >> i) & 1) s.set(i);
        auto fast = find_limit_cycle(net, s, InputAssignment::all_off(), 100);
        auto naive = ggtest::naive_limit_cycle(net, s, InputAssignment::all_off(), 100);
        REQUIRE(fast);
        REQUIRE(naive);
        REQUIRE(fast->period == naive->period);
        REQUIRE(fast->transient_length == naive->transient_length);
    }
}

TEST_CASE("cycle states advance into each other and repeat exactly") {
    ggtest::DrivenRing ring = ggtest::make_driven_ring(7, {0.5, 0.5});
    Dynamics dyn(ring.net);
    auto cycle = dyn.find_limit_cycle(dyn.zero_state(), InputAssignment::single(0), 500);
    REQUIRE(cycle);
    REQUIRE(cycle->period == 7);
    for (uint32_t k = 0; k < cycle->period; ++k) {
        StateVector next = dyn.step(cycle->states[k], InputAssignment::single(0));
        REQUIRE(next == cycle->states[(k + 1) % cycle->period]);
    }
}

TEST_CASE("fast detector matches the naive oracle on random small networks") {
    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        NetworkParams params;
        params.n_nodes = 8 + uint32_t(rng.uniform_u64(13));  // up to 20
        params.threshold_h = int(rng.uniform_u64(3));
        params.target_mean_degree_k = 2.0;
        params.excitatory_fraction = 0.5;
        ConnectionLaw law{0.35, 0.0};
        Network net = generate_network(params, law, rng);
        StateVector start(net.n());
        for (uint32_t i = 0; i < net.n(); ++i)
            if (rng.bernoulli(0.3)) start.set(i);
        auto fast = find_limit_cycle(net, start, InputAssignment::all_off(), 300);
        auto naive = ggtest::naive_limit_cycle(net, start, InputAssignment::all_off(), 300);
        REQUIRE(fast.has_value() == naive.has_value());
        if (fast) {
            REQUIRE(fast->period == naive->period);
            REQUIRE(fast->transient_length == naive->transient_length);
            REQUIRE(fast->states == naive->states);
            ++checked;
        }
    }
    REQUIRE(checked > 150);
}

TEST_CASE("timeout is reported as no cycle") {
    // a long chain takes more steps than the cap allows
    std::vector<Vec2> pos(50);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t i = 0; i < 50; ++i) {
        pos[i] = {0.01 + 0.019 * i, 0.5};
        if (i + 1 < 50) edges.push_back({i, i + 1});
    }
    Network net = ggtest::make_excitatory(0, pos, edges);
    StateVector start(net.n());
    start.set(0);
    REQUIRE(!find_limit_cycle(net, start, InputAssignment::all_off(), 10).has_value());
    REQUIRE(find_limit_cycle(net, start, InputAssignment::all_off(), 100).has_value());
}

TEST_CASE("relaxes_to_rest") {
    SECTION("all-zero relaxes in zero steps") {
        Network net = ggtest::make_excitatory(0, {{0.1, 0.1}, {0.2, 0.2}}, {{0, 1}});
        REQUIRE(relaxes_to_rest(net, StateVector(net.n()), 0));
    }
    SECTION("mutually exciting pair never rests") {
        // two 2-cliques exciting each other, h=0: brute force shows a 2-cycle
        Network net = ggtest::make_excitatory(
            0, {{0.1, 0.1}, {0.1, 0.2}, {0.2, 0.1}, {0.2, 0.2}},
            {{0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 0}, {3, 0}, {2, 1}, {3, 1}});
        StateVector s(net.n());
        s.set(0);
        s.set(1);
        REQUIRE(!relaxes_to_rest(net, s, 200));
        // oracle: the state space is tiny; confirm a cycle without rest
        auto cycle = ggtest::naive_limit_cycle(net, s, InputAssignment::all_off(), 50);
        REQUIRE(cycle);
        bool any_zero = false;
        for (const auto& st : cycle->states) any_zero |= st.is_zero();
        REQUIRE(!any_zero);
    }
    SECTION("driven ring dies out from every cycle phase") {
        ggtest::DrivenRing ring = ggtest::make_driven_ring(11, {0.5, 0.5});
        Dynamics dyn(ring.net);
        auto cycle = dyn.find_limit_cycle(dyn.zero_state(), InputAssignment::single(0), 500);
        REQUIRE(cycle);
        REQUIRE(cycle->period == 11);
        for (const auto& st : cycle->states) REQUIRE(dyn.relaxes_to_rest(st, 100));
    }
}

TEST_CASE("settle_random_steps draws uniformly over the first cycle span") {
    ggtest::DrivenRing ring = ggtest::make_driven_ring(7, {0.5, 0.5});
    Dynamics dyn(ring.net);
    auto cycle = dyn.find_limit_cycle(dyn.zero_state(), InputAssignment::single(0), 500);
    REQUIRE(cycle);
    uint32_t span = cycle->transient_length + cycle->period;

    // The draw is uniform on [0, span]; the state after span steps equals the
    // state at the transient, so that bin carries double weight. Chi-squared
    // against this exact distribution over 10^4 draws.
    Rng rng(31337);
    std::vector<uint32_t> counts(span, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        Rng probe(rng.next_u64());
        auto settled =
            dyn.settle_random_steps(dyn.zero_state(), InputAssignment::single(0), probe, 500);
        REQUIRE(settled);
        const auto& traj = dyn.last_trajectory();  // from settle's own search
        bool matched = false;
        for (uint32_t u = 0; u < span; ++u) {
            if (traj[u] == *settled) {
                ++counts[u];
                matched = true;
                break;
            }
        }
        REQUIRE(matched);
    }
    double chi2 = 0.0;
    for (uint32_t u = 0; u < span; ++u) {
        double expected =
            double(draws) / double(span + 1) * (u == cycle->transient_length ? 2.0 : 1.0);
        chi2 += (counts[u] - expected) * (counts[u] - expected) / expected;
    }
    REQUIRE(span == 7);  // transient 0, period 7 for this ring
    // df = 6, p = 0.01 critical value
    REQUIRE(chi2 < 16.812);
}

TEST_CASE("settle propagates timeouts") {
    std::vector<Vec2> pos(60);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t i = 0; i < 60; ++i) {
        pos[i] = {0.01 + 0.016 * i, 0.5};
        if (i + 1 < 60) edges.push_back({i, i + 1});
    }
    Network net = ggtest::make_excitatory(0, pos, edges);
    StateVector start(net.n());
    start.set(0);
    Rng rng(4);
    REQUIRE(!settle_random_steps(net, start, InputAssignment::all_off(), rng, 10).has_value());
}
