#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "epictrl/centrality.hpp"
#include "epictrl/rng.hpp"
#include "oracles.hpp"

using namespace epictrl;

namespace {

Network from_text(const std::string& text) {
    std::istringstream in(text);
    return load_edge_list(in);
}

const char* kPath3 = "0 1\n1 2";
const char* kK2 = "0 1";
const char* kK4 = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3";
const char* kCycle4 = "0 1\n1 2\n2 3\n3 0";

/// Random tree on n nodes: node i attaches to a random earlier node.
Network random_tree(std::int32_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::int32_t v = 1; v < n; ++v)
        edges.emplace_back(static_cast<std::int32_t>(rng.uniform_below(v)), v);
    return Network::from_edges(n, edges);
}

} // namespace

TEST_CASE("degree centrality") {
    CHECK(degree_centrality(from_text(kPath3)).values == std::vector<double>{1, 2, 1});
    CHECK(degree_centrality(from_text(kK4)).values == std::vector<double>{3, 3, 3, 3});
    Network isolated = Network::from_edges(1, {});
    CHECK(degree_centrality(isolated).values == std::vector<double>{0});
}

TEST_CASE("closeness centrality") {
    auto path3 = closeness_centrality(from_text(kPath3));
    CHECK(path3.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(path3.values[1] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(path3.values[2] == doctest::Approx(1.0).epsilon(1e-15));

    auto k2 = closeness_centrality(from_text(kK2));
    CHECK(k2.values[0] == doctest::Approx(2.0));
    CHECK(k2.values[1] == doctest::Approx(2.0));

    auto k4 = closeness_centrality(from_text(kK4));
    for (double v : k4.values) CHECK(v == doctest::Approx(4.0 / 3.0));

    SUBCASE("disconnected input rejected with advice") {
        try {
            closeness_centrality(from_text("0 1\n2 3"));
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("giant component") != std::string::npos);
        }
    }
    SUBCASE("matches the dense oracle on random connected graphs") {
        SplitMix64 rng(11);
        for (int trial = 0; trial < 10; ++trial) {
            Network net = giant_component(generate_gnp(25, 0.15, rng.next())).graph;
            auto got = closeness_centrality(net);
            auto expected = oracles::closeness_dense(net);
            for (std::size_t i = 0; i < expected.size(); ++i)
                CHECK(got.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("betweenness centrality") {
    SUBCASE("path-3, both semantics") {
        for (auto mode : {BetweennessSemantics::fractional, BetweennessSemantics::indicator}) {
            auto v = betweenness_centrality(from_text(kPath3), mode).values;
            CHECK(v == std::vector<double>{0, 1, 0});
        }
    }
    SUBCASE("K4: all geodesics are direct edges") {
        for (auto mode : {BetweennessSemantics::fractional, BetweennessSemantics::indicator}) {
            auto v = betweenness_centrality(from_text(kK4), mode).values;
            CHECK(v == std::vector<double>{0, 0, 0, 0});
        }
    }
    SUBCASE("4-cycle splits pair credit") {
        auto frac = betweenness_centrality(from_text(kCycle4), BetweennessSemantics::fractional);
        CHECK(frac.values == std::vector<double>{0.5, 0.5, 0.5, 0.5});
        auto ind = betweenness_centrality(from_text(kCycle4), BetweennessSemantics::indicator);
        CHECK(ind.values == std::vector<double>{1, 1, 1, 1});
    }
    SUBCASE("fractional equals indicator on trees") {
        SplitMix64 rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            Network tree = random_tree(20, rng.next());
            auto frac =
                betweenness_centrality(tree, BetweennessSemantics::fractional).values;
            auto ind = betweenness_centrality(tree, BetweennessSemantics::indicator).values;
            for (std::size_t i = 0; i < frac.size(); ++i)
                CHECK(frac[i] == doctest::Approx(ind[i]).epsilon(1e-12));
        }
    }
    SUBCASE("Brandes matches pair-counting oracle on random graphs") {
        SplitMix64 rng(6);
        for (int trial = 0; trial < 8; ++trial) {
            Network net = generate_gnp(18, 0.2, rng.next());
            auto got = betweenness_centrality(net, BetweennessSemantics::fractional).values;
            auto expected = oracles::betweenness_pairs(net);
            for (std::size_t i = 0; i < expected.size(); ++i)
                CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("pagerank centrality") {
    SUBCASE("K2 fixed point is 20/3") {
        auto scores = pagerank_centrality(from_text(kK2));
        CHECK(scores.values[0] == doctest::Approx(20.0 / 3.0).epsilon(1e-10));
        CHECK(scores.values[1] == doctest::Approx(20.0 / 3.0).epsilon(1e-10));
    }
    SUBCASE("eta = 0 gives all delta") {
        PagerankParams params;
        params.eta = 0.0;
        params.delta = 1.0;
        auto scores = pagerank_centrality(from_text(kK4), params);
        for (double v : scores.values) CHECK(v == 1.0);
    }
    SUBCASE("path-3 matches the dense 2x2 solve") {
        // P_a = 0.425 P_b + 1 and P_b = 1.7 P_a + 1 give P = (190/37, 360/37, 190/37)
        auto scores = pagerank_centrality(from_text(kPath3));
        CHECK(scores.values[0] == doctest::Approx(190.0 / 37.0).epsilon(1e-10));
        CHECK(scores.values[1] == doctest::Approx(360.0 / 37.0).epsilon(1e-10));
        CHECK(scores.values[2] == doctest::Approx(190.0 / 37.0).epsilon(1e-10));
        auto dense = oracles::pagerank_dense(from_text(kPath3), 0.85, 1.0);
        CHECK(dense[0] == doctest::Approx(190.0 / 37.0).epsilon(1e-12));
        CHECK(dense[1] == doctest::Approx(360.0 / 37.0).epsilon(1e-12));
    }
    SUBCASE("residual contract holds") {
        SplitMix64 rng(13);
        for (int trial = 0; trial < 5; ++trial) {
            Network net = giant_component(generate_gnp(30, 0.12, rng.next())).graph;
            PagerankParams params;
            params.tolerance = 1e-11;
            auto scores = pagerank_centrality(net, params);
            // apply the update once more and measure the residual directly
            double residual = 0.0;
            for (std::int32_t i = 0; i < net.node_count(); ++i) {
                double acc = 0.0;
                for (std::int32_t j : net.neighbors(i))
                    acc += scores.values[j] / net.degree(j);
                residual = std::max(residual,
                                    std::abs(params.eta * acc + params.delta - scores.values[i]));
            }
            CHECK(residual <= params.tolerance);
            auto dense = oracles::pagerank_dense(net, params.eta, params.delta);
            for (std::int32_t i = 0; i < net.node_count(); ++i)
                CHECK(scores.values[i] == doctest::Approx(dense[i]).epsilon(1e-8));
        }
    }
    SUBCASE("isolated node rejected when eta > 0") {
        Network net = Network::from_edges(3, std::vector<std::pair<std::int32_t, std::int32_t>>{{0, 1}});
        CHECK_THROWS(pagerank_centrality(net));
        PagerankParams params;
        params.eta = 0.0;
        CHECK_NOTHROW(pagerank_centrality(net, params));
    }
    SUBCASE("non-convergence reports the residual") {
        PagerankParams params;
        params.max_iterations = 1;
        params.tolerance = 1e-15;
        CHECK_THROWS(pagerank_centrality(from_text(kK4), params));
    }
}

TEST_CASE("grouping by centrality") {
    SUBCASE("forced split without ties") {
        CentralityScores scores;
        scores.values = {5, 3, 1, 4, 2, 0};
        Grouping grp = group_by_centrality(scores, 3, 1);
        // ascending: ids 5(0),2(1),4(2),1(3),3(4),0(5)
        CHECK(grp.group_of(5) == 0);
        CHECK(grp.group_of(2) == 0);
        CHECK(grp.group_of(4) == 1);
        CHECK(grp.group_of(1) == 1);
        CHECK(grp.group_of(3) == 2);
        CHECK(grp.group_of(0) == 2);
        for (std::int32_t m = 0; m < 3; ++m) CHECK(grp.fraction(m) == doctest::Approx(1.0 / 3));
    }
    SUBCASE("single group") {
        CentralityScores scores;
        scores.values = {1, 2, 3};
        Grouping grp = group_by_centrality(scores, 1, 0);
        CHECK(grp.group_count() == 1);
        CHECK(grp.fraction(0) == 1.0);
    }
    SUBCASE("boundary tie resolved by seeded choice") {
        CentralityScores scores;
        scores.values = {1, 1, 1, 2};
        Grouping grp = group_by_centrality(scores, 2, 77);
        CHECK(grp.size(0) == 2);
        CHECK(grp.size(1) == 2);
        CHECK(grp.group_of(3) == 1); // untied top score always lands on top
        // same seed, same partition
        Grouping again = group_by_centrality(scores, 2, 77);
        CHECK(grp.assignments() == again.assignments());
        // some seed must place a different tied node up top
        bool differs = false;
        for (std::uint64_t seed = 0; seed < 32 && !differs; ++seed)
            differs = group_by_centrality(scores, 2, seed).assignments() != grp.assignments();
        CHECK(differs);
    }
    SUBCASE("uneven sizes: first N mod M groups get the extra node") {
        CentralityScores scores;
        scores.values = {0, 1, 2, 3, 4, 5, 6};
        Grouping grp = group_by_centrality(scores, 3, 0);
        CHECK(grp.size(0) == 3);
        CHECK(grp.size(1) == 2);
        CHECK(grp.size(2) == 2);
        std::int32_t total = 0;
        for (std::int32_t m = 0; m < 3; ++m) total += grp.size(m);
        CHECK(total == 7); // partition, exactly
    }
    SUBCASE("monotone in score up to boundary ties") {
        SplitMix64 rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            CentralityScores scores;
            for (int i = 0; i < 23; ++i)
                scores.values.push_back(static_cast<double>(rng.uniform_below(6)));
            Grouping grp = group_by_centrality(scores, 4, rng.next());
            for (std::int32_t m = 0; m + 1 < 4; ++m) {
                double hi_m = -1e300, lo_next = 1e300;
                for (std::size_t i = 0; i < scores.values.size(); ++i) {
                    if (grp.group_of(static_cast<std::int32_t>(i)) == m)
                        hi_m = std::max(hi_m, scores.values[i]);
                    if (grp.group_of(static_cast<std::int32_t>(i)) == m + 1)
                        lo_next = std::min(lo_next, scores.values[i]);
                }
                CHECK(hi_m <= lo_next);
            }
        }
    }
    SUBCASE("more groups than nodes rejected") {
        CentralityScores scores;
        scores.values = {1, 2};
        CHECK_THROWS(group_by_centrality(scores, 3, 0));
    }
}
