#include "doctest.h"
#include "oracles.hpp"

#include "segchain/errors.hpp"
#include "segchain/meetflow.hpp"
#include "segchain/zoo.hpp"

#include <sstream>

using namespace segchain;

TEST_SUITE("meetflow") {

TEST_CASE("trajectory enumeration")
{
    auto det = MarkovChain({"a", "b"}, {{{1, Rational(1)}}, {{0, Rational(1)}}});
    auto one = enumerate_trajectories(det, 0, 5);
    REQUIRE(one.paths.size() == 1);
    CHECK(one.paths[0].probability == 1);

    auto two = two_state_chain(Rational(1, 3)).chain;
    auto eight = enumerate_trajectories(two, 0, 3);
    CHECK(eight.paths.size() == 8);
    Rational sum = 0;
    for (auto& p : eight.paths)
        sum += p.probability;
    CHECK(sum == 1);

    auto h = haggstrom_chain(Rational(7, 10));
    CHECK(enumerate_trajectories(h.chain, h.at("x"), 2).paths.size() == 4);
    CHECK_THROWS_AS(enumerate_trajectories(two, 0, 10, 100), BudgetExceeded);

    std::mt19937 rng(41);
    auto c = oracle::random_chain(rng, 3);
    auto mine = enumerate_trajectories(c, 1, 3);
    auto ref = oracle::paths(c, 1, 3);
    REQUIRE(mine.paths.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(mine.paths[i].states == ref[i].states);
        CHECK(mine.paths[i].probability == ref[i].p);
    }
}

TEST_CASE("flow network structure")
{
    auto split = MarkovChain({"a", "b"}, {{{0, Rational(1)}}, {{1, Rational(1)}}});
    auto disjoint = build_flow_network(enumerate_trajectories(split, 0, 3),
                                       enumerate_trajectories(split, 1, 3));
    CHECK(disjoint.middle().empty());
    CHECK(max_flow(disjoint).value == 0);

    auto two = two_state_chain(Rational(1, 3)).chain;
    auto same = build_flow_network(enumerate_trajectories(two, 0, 2),
                                   enumerate_trajectories(two, 0, 2));
    CHECK(same.middle().size() == 16);
    CHECK(max_flow(same).value == 1);

    // T = 1 from 0 and 1: x-paths 00, 01; y-paths 10, 11. Pairs meeting at
    // time 1 are (00, 10) and (01, 11).
    auto small = build_flow_network(enumerate_trajectories(two, 0, 1),
                                    enumerate_trajectories(two, 1, 1));
    REQUIRE(small.middle().size() == 2);
    CHECK(small.middle()[0].x == 0);
    CHECK(small.middle()[0].y == 0);
    CHECK(small.middle()[1].x == 1);
    CHECK(small.middle()[1].y == 1);

    CHECK_THROWS_AS(build_flow_network(enumerate_trajectories(two, 0, 1),
                                       enumerate_trajectories(two, 1, 2)),
                    DimensionMismatch);
}

TEST_CASE("serial and parallel network construction agree")
{
    auto c = birth_death_chain(3, Rational(1, 3)).chain;
    auto a = build_flow_network(enumerate_trajectories(c, 0, 6), enumerate_trajectories(c, 3, 6),
                                Execution::serial);
    auto b = build_flow_network(enumerate_trajectories(c, 0, 6), enumerate_trajectories(c, 3, 6),
                                Execution::parallel);
    REQUIRE(a.middle().size() == b.middle().size());
    for (std::size_t i = 0; i < a.middle().size(); ++i) {
        CHECK(a.middle()[i].x == b.middle()[i].x);
        CHECK(a.middle()[i].y == b.middle()[i].y);
    }
}

TEST_CASE("maximum flow examples")
{
    auto two = two_state_chain(Rational(1, 10)).chain;
    CHECK(optimal_meeting_probability(two, 0, 1, 2) == Rational(19, 50));
    auto h7 = haggstrom_chain(Rational(7, 10));
    CHECK(optimal_meeting_probability(h7.chain, h7.at("x"), h7.at("y"), 2) == 1);
    auto h9 = haggstrom_chain(Rational(9, 10));
    CHECK(optimal_meeting_probability(h9.chain, h9.at("x"), h9.at("y"), 2) < 1);
}

TEST_CASE("Dinic agrees with the Edmonds-Karp oracle")
{
    std::mt19937 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = oracle::random_chain(rng, 2 + trial % 2, 4);
        const std::size_t T = 1 + trial % 4;
        CHECK(optimal_meeting_probability(c, 0, c.size() - 1, T) ==
              oracle::meeting(c, 0, c.size() - 1, T));
    }
}

TEST_CASE("extracted couplings have exact marginals")
{
    std::mt19937 rng(43);
    for (int trial = 0; trial < 15; ++trial) {
        auto c = oracle::random_chain(rng, 3, 3);
        const std::size_t T = 1 + trial % 3;
        auto net = build_flow_network(enumerate_trajectories(c, 0, T),
                                      enumerate_trajectories(c, 2, T));
        auto flow = max_flow(net);
        auto plan = extract_coupling(net, flow);
        CHECK(plan.total_flow() == flow.value);
        CHECK(plan.meeting_probability() == flow.value);
        // Row and column sums of the joint mass.
        for (std::uint32_t i = 0; i < net.xs().paths.size(); ++i) {
            Rational s = 0;
            for (std::uint32_t j = 0; j < net.ys().paths.size(); ++j)
                s += plan.joint_mass(i, j);
            CHECK(s == net.xs().paths[i].probability);
        }
        for (std::uint32_t j = 0; j < net.ys().paths.size(); ++j) {
            Rational s = 0;
            for (std::uint32_t i = 0; i < net.xs().paths.size(); ++i)
                s += plan.joint_mass(i, j);
            CHECK(s == net.ys().paths[j].probability);
        }
        auto tc = plan.to_trajectory_coupling(c);
        CHECK(check_marginals(c, 0, 2, T, tc.masses()).correct);
        CHECK(meeting_time_distribution(tc, T).cdf.back() == flow.value);
    }
}

TEST_CASE("extraction at the extremes")
{
    auto split = MarkovChain({"a", "b"}, {{{0, Rational(1)}}, {{1, Rational(1)}}});
    auto net = build_flow_network(enumerate_trajectories(split, 0, 2),
                                  enumerate_trajectories(split, 1, 2));
    auto plan = extract_coupling(net, max_flow(net));
    CHECK(plan.meeting_probability() == 0);
    CHECK(plan.joint_mass(0, 0) == 1);

    auto h = haggstrom_chain(Rational(7, 10));
    auto hn = build_flow_network(enumerate_trajectories(h.chain, h.at("x"), 2),
                                 enumerate_trajectories(h.chain, h.at("y"), 2));
    auto hp = extract_coupling(hn, max_flow(hn));
    CHECK(hp.meeting_probability() == 1);
    for (auto& r : hp.residual_x())
        CHECK(r == 0);

    auto two = two_state_chain(Rational(1, 10)).chain;
    auto tn = build_flow_network(enumerate_trajectories(two, 0, 2),
                                 enumerate_trajectories(two, 1, 2));
    auto tp = extract_coupling(tn, max_flow(tn));
    CHECK(tp.meeting_probability() == Rational(19, 50));
    CHECK(check_marginals(two, 0, 1, 2, tp.to_trajectory_coupling(two).masses()).correct);
}

TEST_CASE("duality on small chains")
{
    std::mt19937 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> num(1, 20);
        Rational alpha(num(rng), 21);
        alpha.canonicalize();
        auto c = two_state_chain(alpha).chain;
        auto rep = verify_duality(c, 0, 1, 1 + trial % 6);
        CHECK(rep.holds);
        CHECK(rep.max_flow == 2 - rep.separation);
    }
    for (int trial = 0; trial < 20; ++trial) {
        auto c = oracle::random_chain(rng, 3, 4);
        auto rep = verify_duality(c, 0, 1, 1 + trial % 4);
        CHECK(rep.holds);
        CHECK(separation_value(c, 0, 1, rep.sequence).value == rep.separation);
    }
}

TEST_CASE("meeting within a layered irreducible chain")
{
    // P(x', y') >= eps for every pair: C over k rounds is at least
    // 2 - 2(1 - eps)^k. Here P > 0 entrywise with eps = 1/4 per step.
    auto c = MarkovChain::from_dense(
        {"a", "b", "c"},
        {{Rational(1, 2), Rational(1, 4), Rational(1, 4)},
         {Rational(1, 4), Rational(1, 2), Rational(1, 4)},
         {Rational(1, 4), Rational(1, 4), Rational(1, 2)}});
    const Rational eps(1, 4);
    for (std::size_t k = 1; k <= 4; ++k) {
        auto C = optimal_meeting_probability(c, 0, 2, k);
        CHECK(C >= 1 - power(1 - eps, k));
        CHECK(C >= 2 - 2 * power(1 - eps, k) - 1);
    }
}

TEST_CASE("network and plan output")
{
    auto two = two_state_chain(Rational(1, 2)).chain;
    auto net = build_flow_network(enumerate_trajectories(two, 0, 1),
                                  enumerate_trajectories(two, 1, 1));
    auto flow = max_flow(net);
    auto doc = network_to_json(net, two, &flow);
    CHECK(doc.is_object());
    std::ostringstream csv;
    write_plan_csv(csv, extract_coupling(net, flow), two);
    CHECK(csv.str().rfind("x_path,y_path,mass\n", 0) == 0);
    CHECK(csv.str().find("0|0,1|0,1/2") != std::string::npos);
    CHECK(path_to_string({0, 1, 1}, two) == "0|1|1");
}

}
