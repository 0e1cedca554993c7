#include <catch2/catch_amalgamated.hpp>

#include "glidergates/generation.hpp"
#include "glidergates/io.hpp"
#include "glidergates/rewiring.hpp"
#include "test_helpers.hpp"

using namespace gg;

namespace {

Network random_net(uint32_t n, double k, uint64_t seed, double lambda = 8.0, double K = 2.0) {
    NetworkParams params;
    params.n_nodes = n;
    params.target_mean_degree_k = k;
    params.rng_seed = seed;
    Rng rng(seed);
    return generate_network(params, ConnectionLaw{K, lambda}, rng);
}

NodePredicate everywhere() {
    return [](uint32_t) { return true; };
}

}  // namespace

TEST_CASE("apply and undo restore the network byte for byte") {
    Network net = random_net(80, 6.0, 17);
    std::string before = network_to_text(net);
    RewireJournal journal;
    Rng rng(3);
    auto swap = propose_swap(net, everywhere(), everywhere(), 10.0, rng);
    REQUIRE(swap);
    apply_swap(net, journal, *swap);
    REQUIRE(network_to_text(net) != before);
    REQUIRE(journal.size() == 1);
    undo_last(net, journal, 1);
    REQUIRE(network_to_text(net) == before);
    REQUIRE(journal.empty());
}

TEST_CASE("degrees are invariant under apply/undo sequences") {
    Network net = random_net(100, 8.0, 5);
    auto in0 = net.in_degrees();
    auto out0 = net.out_degrees();
    RewireJournal journal;
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        auto swap = propose_swap(net, everywhere(), everywhere(), 10.0, rng);
        if (!swap) continue;
        apply_swap(net, journal, *swap);
        if (rng.bernoulli(0.3)) undo_last(net, journal, 1);
    }
    REQUIRE(net.in_degrees() == in0);
    REQUIRE(net.out_degrees() == out0);
    // no self loops or duplicates anywhere along the way (checked per state)
    net.check_structure();
    net.rebuild_edge_set();
}

TEST_CASE("random 100-swap journal fully undone restores the original") {
    Network net = random_net(120, 8.0, 23);
    std::string original = network_to_text(net);
    RewireJournal journal;
    Rng rng(29);
    while (journal.size() < 100) {
        auto swap = propose_swap(net, everywhere(), everywhere(), 0.5, rng);
        REQUIRE(swap);
        apply_swap(net, journal, *swap);
    }
    undo_last(net, journal, 100);
    REQUIRE(network_to_text(net) == original);

    // replay oracle: re-applying a saved journal reproduces the trained state
    RewireJournal journal2;
    Rng rng2(29);
    while (journal2.size() < 100) {
        auto swap = propose_swap(net, everywhere(), everywhere(), 0.5, rng2);
        apply_swap(net, journal2, *swap);
    }
    std::string trained = network_to_text(net);
    std::string journal_text = journal_to_text(journal2);
    undo_last(net, journal2, 100);
    RewireJournal replayed;
    replay_journal_text(net, replayed, journal_text);
    REQUIRE(network_to_text(net) == trained);
    REQUIRE(replayed.size() == 100);
}

TEST_CASE("partial undo lands on the intermediate state") {
    Network net = random_net(60, 6.0, 31);
    RewireJournal journal;
    Rng rng(4);
    auto s1 = propose_swap(net, everywhere(), everywhere(), 10.0, rng);
    apply_swap(net, journal, *s1);
    std::string after_s1 = network_to_text(net);
    auto s2 = propose_swap(net, everywhere(), everywhere(), 10.0, rng);
    apply_swap(net, journal, *s2);
    auto s3 = propose_swap(net, everywhere(), everywhere(), 10.0, rng);
    apply_swap(net, journal, *s3);

    undo_last(net, journal, 0);  // no-op
    REQUIRE(journal.size() == 3);
    undo_last(net, journal, 2);
    REQUIRE(network_to_text(net) == after_s1);
    REQUIRE_THROWS_AS(undo_last(net, journal, 5), std::invalid_argument);
}

TEST_CASE("proposals respect the window, the filter, and the length cap") {
    Network net = random_net(150, 8.0, 41);
    Rng rng(6);

    SECTION("length cap") {
        // a random edge pair rarely yields two short cross edges, so the
        // proposal may legitimately come back empty; every returned swap must
        // respect the cap
        const double max_len = 0.21;
        int found = 0;
        for (int i = 0; i < 200; ++i) {
            auto swap = propose_swap(net, everywhere(), everywhere(), max_len, rng);
            if (!swap) continue;
            ++found;
            REQUIRE(dist(net.pos[swap->src_a], net.pos[swap->old_dst_b]) <= max_len);
            REQUIRE(dist(net.pos[swap->src_b], net.pos[swap->old_dst_a]) <= max_len);
        }
        REQUIRE(found > 0);
    }
    SECTION("no self loops or duplicates are ever produced") {
        RewireJournal journal;
        for (int i = 0; i < 300; ++i) {
            auto swap = propose_swap(net, everywhere(), everywhere(), 0.5, rng);
            REQUIRE(swap);
            apply_swap(net, journal, *swap);
            net.check_structure();
        }
        net.rebuild_edge_set();  // throws on duplicates
    }
    SECTION("window constrains both post-swap targets") {
        Vec2 center{0.5, 0.5};
        auto window = [&](uint32_t node) { return dist(net.pos[node], center) <= 0.15; };
        for (int i = 0; i < 50; ++i) {
            auto swap = propose_swap(net, everywhere(), window, 10.0, rng);
            REQUIRE(swap);
            REQUIRE(window(swap->old_dst_a));
            REQUIRE(window(swap->old_dst_b));
        }
    }
    SECTION("at least one source passes the filter") {
        auto filter = [&](uint32_t node) { return node < 10; };
        for (int i = 0; i < 50; ++i) {
            auto swap = propose_swap(net, filter, everywhere(), 10.0, rng);
            REQUIRE(swap);
            REQUIRE((swap->src_a < 10 || swap->src_b < 10));
        }
    }
    SECTION("over-constrained windows return nothing") {
        auto nothing = [](uint32_t) { return false; };
        REQUIRE(!propose_swap(net, everywhere(), nothing, 10.0, rng).has_value());
    }
}

TEST_CASE("stale swaps are rejected") {
    Network net = random_net(60, 6.0, 53);
    RewireJournal journal;
    Rng rng(9);
    auto s1 = propose_swap(net, everywhere(), everywhere(), 10.0, rng);
    REQUIRE(s1);
    Swap stale = *s1;
    apply_swap(net, journal, *s1);
    REQUIRE_THROWS_AS(apply_swap(net, journal, stale), std::invalid_argument);
}

TEST_CASE("input-node out-edges swap like any other and keep their strength") {
    Network net = random_net(80, 6.0, 61);
    net.designate_input(7);
    Rng rng(2);
    auto from_input = [&](uint32_t node) { return node == 7; };
    auto swap = propose_swap(net, from_input, everywhere(), 10.0, rng);
    REQUIRE(swap);
    RewireJournal journal;
    apply_swap(net, journal, *swap);
    // the rewired edge's weight still comes from its source
    REQUIRE(std::abs(net.source_weight(7)) == net.params.threshold_h + 1);
}

TEST_CASE("journal file round-trips") {
    Network net = random_net(60, 6.0, 71);
    RewireJournal journal;
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        auto swap = propose_swap(net, everywhere(), everywhere(), 0.5, rng);
        apply_swap(net, journal, *swap);
    }
    std::string text = journal_to_text(journal);
    // four integers per line
    std::istringstream in(text);
    std::string line;
    size_t lines = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        uint32_t a, b, c, d;
        REQUIRE((ls >> a >> b >> c >> d));
        ++lines;
    }
    REQUIRE(lines == 20);
}
