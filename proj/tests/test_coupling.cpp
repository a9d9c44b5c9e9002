#include "doctest.h"
#include "oracles.hpp"

#include "segchain/coupling.hpp"
#include "segchain/coupling_io.hpp"
#include "segchain/errors.hpp"
#include "segchain/meetflow.hpp"
#include "segchain/zoo.hpp"

#include <sstream>

using namespace segchain;

namespace {

MarkovianCouplingKernel independent(const MarkovChain& c)
{
    return MarkovianCouplingKernel(c, JointKernel::independent(c));
}

} // namespace

TEST_SUITE("coupling") {

TEST_CASE("independent coupling is faithful with exact marginals")
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = oracle::random_chain(rng, 3);
        auto k = independent(c);
        CHECK(check_faithful(k).faithful);
        CHECK(check_marginals(k, 0, 2, 3).correct);
        CHECK(check_aggregate_marginals(k, 0, 2, 3).correct);
    }
}

TEST_CASE("malformed joint kernels are rejected")
{
    auto c = two_state_chain(Rational(1, 4)).chain;
    JointKernel empty(2);
    CHECK_THROWS_AS(MarkovianCouplingKernel(c, empty), ParseError);
    auto jk = JointKernel::independent(c);
    jk.set_row(0, 1, {{0, 0, Rational(1, 2)}});
    CHECK_THROWS_AS(MarkovianCouplingKernel(c, jk), ParseError);
}

TEST_CASE("mimicking coupling of the NB chain")
{
    for (unsigned m : {1u, 2u, 3u}) {
        auto nb = nb_chain(m, Rational(2, 3));
        auto x = nb.zoo.at("x");
        auto y = nb.zoo.at("y");
        auto res = check_faithful(nb.mimicking);
        CHECK_FALSE(res.faithful);
        REQUIRE(res.witness);
        CHECK_FALSE(describe(*res.witness, nb.zoo.chain).empty());
        CHECK(check_marginals(nb.mimicking, x, y, m + 3).correct);
        auto mtd = meeting_time_distribution(nb.mimicking, x, y, m + 2);
        CHECK(mtd.cdf.back() == 1);
        // Not faithful, so the coupling inequality may fail, but the
        // segregation bound holds at every time.
        for (std::size_t n = 0; n <= m + 2; ++n)
            CHECK(segregation_bound_check(nb.zoo.chain, x, y, mtd, n).pass);
    }
    auto nb = nb_chain(3, Rational(3, 4));
    auto x = nb.zoo.at("x");
    auto y = nb.zoo.at("y");
    auto mtd = meeting_time_distribution(nb.mimicking, x, y, 5);
    CHECK(mtd.cdf.back() == 1);
    // After meeting the copies separate with positive probability.
    CHECK(separation_after_meeting(nb.mimicking, x, y, 5) > 0);
    bool some_fail = false;
    for (std::size_t n = 0; n <= 5; ++n)
        some_fail = some_fail || !coupling_inequality_check(nb.zoo.chain, x, y, mtd, n).pass;
    CHECK(some_fail);
}

TEST_CASE("make_sticky keeps marginals and glues the copies")
{
    auto two = two_state_chain(Rational(1, 4)).chain;
    auto sticky = make_sticky(independent(two));
    CHECK(check_faithful(sticky).faithful);
    CHECK(check_marginals(sticky, 0, 1, 4).correct);
    for (auto& t : sticky.at_step(0).row(0, 0))
        CHECK(t.x == t.y);
    CHECK(separation_after_meeting(sticky, 0, 1, 4) == 0);

    // Idempotent.
    auto twice = make_sticky(sticky);
    for (State a = 0; a < 2; ++a)
        for (State b = 0; b < 2; ++b) {
            auto r1 = sticky.at_step(0).row(a, b);
            auto r2 = twice.at_step(0).row(a, b);
            REQUIRE(r1.size() == r2.size());
            for (std::size_t i = 0; i < r1.size(); ++i) {
                CHECK(r1[i].x == r2[i].x);
                CHECK(r1[i].y == r2[i].y);
                CHECK(r1[i].p == r2[i].p);
            }
        }

    auto h = haggstrom_chain(Rational(7, 10));
    auto hs = make_sticky(independent(h.chain));
    CHECK(separation_after_meeting(hs, h.at("x"), h.at("y"), 2) == 0);

    auto nb = nb_chain(2, Rational(1, 2));
    CHECK_THROWS_AS(make_sticky(nb.mimicking), DomainError);
}

TEST_CASE("meeting time and the coupling inequality")
{
    auto two = two_state_chain(Rational(1, 4)).chain;
    auto k = independent(two);
    auto same = meeting_time_distribution(k, 0, 0, 3);
    CHECK(same.cdf[0] == 1);

    auto mtd = meeting_time_distribution(k, 0, 1, 3);
    CHECK(mtd.cdf[0] == 0);
    // Independent copies from 0 and 1 meet at each step with probability
    // 2 alpha (1 - alpha) = 3/8.
    CHECK(mtd.cdf[3] == 1 - power(Rational(5, 8), 3));
    auto rep = coupling_inequality_check(two, 0, 1, mtd, 3);
    CHECK(rep.tv == Rational(1, 8));
    CHECK(rep.pass);
    auto zero = coupling_inequality_check(two, 0, 1, mtd, 0);
    CHECK(zero.bound == 1);
    CHECK(zero.pass);

    // Against trajectory enumeration.
    auto traj = to_trajectory_coupling(k, 0, 1, 3);
    auto via = meeting_time_distribution(traj, 3);
    CHECK(via.cdf == mtd.cdf);
    CHECK_THROWS_AS(meeting_time_distribution(traj, 4), DimensionMismatch);

    std::mt19937 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = oracle::random_chain(rng, 3);
        auto sk = make_sticky(independent(c));
        auto m = meeting_time_distribution(sk, 0, 1, 5);
        CHECK(coupling_inequality_check(c, 0, 1, m, 5).pass);
    }
}

TEST_CASE("segregation bound examples")
{
    auto h = haggstrom_chain(Rational(7, 10));
    auto x = h.at("x");
    auto y = h.at("y");
    auto net = build_flow_network(enumerate_trajectories(h.chain, x, 2),
                                  enumerate_trajectories(h.chain, y, 2));
    auto plan = extract_coupling(net, max_flow(net));
    auto mtd = meeting_time_distribution(plan.to_trajectory_coupling(h.chain), 2);
    CHECK(mtd.cdf[2] == 1);
    auto rep = segregation_bound_check(h.chain, x, y, mtd, 2);
    CHECK(rep.tv == Rational(4, 25));
    CHECK(rep.bound == Rational(1, 2));
    CHECK(rep.pass);

    MeetingTimeDistribution never{{0, 0, 0}};
    auto triv = segregation_bound_check(h.chain, x, y, never, 2);
    CHECK(triv.bound == 1);
    CHECK(triv.pass);
}

TEST_CASE("trajectory couplings validate their marginals")
{
    auto two = two_state_chain(Rational(1, 2)).chain;
    TrajectoryCoupling::Masses bad;
    bad[{{0, 0}, {1, 1}}] = 1;
    CHECK_THROWS_AS(TrajectoryCoupling(two, 0, 1, 1, bad), InvariantViolation);
    TrajectoryCoupling::Masses good;
    good[{{0, 0}, {1, 0}}] = Rational(1, 2);
    good[{{0, 1}, {1, 1}}] = Rational(1, 2);
    TrajectoryCoupling tc(two, 0, 1, 1, good);
    CHECK(meeting_time_distribution(tc, 1).cdf[1] == 1);
}

TEST_CASE("tmix upper bound")
{
    CHECK(tmix_upper_bound(1, Rational(1)) == 2);
    CHECK(tmix_upper_bound(3, Rational(1, 2)) == 15);
    // (1 - alpha/2)^k <= 1/4 at the returned k and not before.
    for (auto alpha : {Rational(1, 3), Rational(1, 10), Rational(7, 9), Rational(1, 1000)}) {
        auto k = tmix_upper_bound(1, alpha);
        CHECK(power(1 - alpha / 2, k) <= Rational(1, 4));
        CHECK(power(1 - alpha / 2, k - 1) > Rational(1, 4));
    }
    CHECK_THROWS_AS(tmix_upper_bound(1, Rational(0)), DomainError);
    CHECK_THROWS_AS(tmix_upper_bound(1, Rational(3, 2)), DomainError);
}

TEST_CASE("coupling documents round-trip")
{
    auto nb = nb_chain(2, Rational(1, 2));
    auto doc = coupling_to_json(nb.mimicking);
    auto back = coupling_from_json(doc);
    const auto& c = nb.zoo.chain;
    for (State a = 0; a < c.size(); ++a)
        for (State b = 0; b < c.size(); ++b) {
            auto r1 = nb.mimicking.at_step(0).row(a, b);
            auto r2 = back.at_step(0).row(a, b);
            REQUIRE(r1.size() == r2.size());
            for (std::size_t i = 0; i < r1.size(); ++i)
                CHECK(r1[i].p == r2[i].p);
        }

    auto two = two_state_chain(Rational(1, 4)).chain;
    auto partial = nlohmann::json::parse(R"({"chain": {"states": ["0", "1"], "transitions": [
        {"from": "0", "to": "1", "p": "1/4"}, {"from": "0", "to": "0", "p": "3/4"},
        {"from": "1", "to": "0", "p": "1/4"}, {"from": "1", "to": "1", "p": "3/4"}]},
        "transitions": [{"from": ["0", "0"], "to": ["1", "1"], "p": "1/4"},
                        {"from": ["0", "0"], "to": ["0", "0"], "p": "3/4"}]})");
    auto k = coupling_from_json(partial);
    CHECK(k.at_step(0).row(0, 1).size() == 4);
    CHECK(k.at_step(0).row(0, 0).size() == 2);
    CHECK(check_faithful(k).faithful);

    auto broken = partial;
    broken["transitions"][0]["p"] = "1/3";
    CHECK_THROWS_AS(coupling_from_json(broken), ParseError);

    auto seq = SeparatingSequence::constant(StateSet::of(2, {0}), 3);
    CHECK(sequence_from_json(sequence_to_json(seq, two), two) == seq);
}

}
