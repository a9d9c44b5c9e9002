#include "doctest.h"
#include "oracles.hpp"

#include "segchain/errors.hpp"
#include "segchain/formulas.hpp"
#include "segchain/meetflow.hpp"
#include "segchain/zoo.hpp"

#include <cmath>

using namespace segchain;

TEST_SUITE("zoo") {

TEST_CASE("two-state chain")
{
    auto half = two_state_chain(Rational(1, 2));
    for (State s = 0; s < 2; ++s)
        CHECK(evolve(half.chain, Distribution::point(2, s), 1) == Distribution::uniform(2));
    auto quarter = two_state_chain(Rational(1, 4)).chain;
    for (std::size_t T = 0; T <= 8; ++T)
        CHECK(d_bar(quarter, T) == power(Rational(1, 2), T));
    CHECK(half.at("x") == 0);
    CHECK(half.at("y") == 1);
    CHECK_THROWS_AS(two_state_chain(Rational(0)), DomainError);
    CHECK_THROWS_AS(two_state_chain(Rational(3, 2)), DomainError);
}

TEST_CASE("Haggstrom chain landing probabilities")
{
    for (auto p : {Rational(1, 2), Rational(7, 10), Rational(1, 3), Rational(9, 10)}) {
        auto h = haggstrom_chain(p);
        CHECK(h.chain.size() == 6);
        auto a = h.at("a");
        auto b = h.at("b");
        auto fx = evolve(h.chain, Distribution::point(6, h.at("x")), 2);
        auto fy = evolve(h.chain, Distribution::point(6, h.at("y")), 2);
        CHECK(fx[a] == 1 - 2 * p * (1 - p));
        CHECK(fx[b] == 2 * p * (1 - p));
        CHECK(fy[a] == 2 * p * (1 - p));
        CHECK(fy[b] == 1 - 2 * p * (1 - p));
        CHECK(tv_distance(fx, fy) == (1 - 2 * p) * (1 - 2 * p));
        CHECK(h.chain.is_absorbing(a));
        CHECK(h.chain.is_absorbing(b));
    }
    auto h = haggstrom_chain(Rational(1, 2));
    CHECK(tv_distance(evolve(h.chain, Distribution::point(6, h.at("x")), 2),
                      evolve(h.chain, Distribution::point(6, h.at("y")), 2)) == 0);
    auto near = haggstrom_chain(Rational(707107, 1000000));
    auto tv = tv_distance(evolve(near.chain, Distribution::point(6, near.at("x")), 2),
                          evolve(near.chain, Distribution::point(6, near.at("y")), 2));
    CHECK(std::abs(to_double(tv) - (3 - 2 * std::sqrt(2.0))) < 1e-5);
}

TEST_CASE("NB chain absorption laws")
{
    for (unsigned m : {1u, 2u, 3u, 5u}) {
        for (auto p : {Rational(1, 2), Rational(2, 3), Rational(1, 5), Rational(m, m + 1)}) {
            auto nb = nb_chain(m, p);
            const auto& c = nb.zoo.chain;
            CHECK(c.size() == 3 * m + 5);
            auto lx = limit_distribution(c, Distribution::point(c.size(), nb.zoo.at("x")));
            auto ly = limit_distribution(c, Distribution::point(c.size(), nb.zoo.at("y")));
            Rational tail_x = 1, tail_y = 1;
            for (unsigned j = 0; j <= m; ++j) {
                State s = c.index_of(std::to_string(j));
                CHECK(lx[s] == nb_pmf(1, p, j));
                CHECK(ly[s] == nb_pmf(2, p, j));
                tail_x -= nb_pmf(1, p, j);
                tail_y -= nb_pmf(2, p, j);
            }
            CHECK(lx[c.index_of(">")] == tail_x);
            CHECK(ly[c.index_of(">")] == tail_y);
            CHECK(tail_x == oracle::tail_nb1(p, m));
            CHECK(tail_y == oracle::tail_nb2(p, m));
            // Absorbed within m + 2 steps from both starts.
            auto ex = evolve(c, Distribution::point(c.size(), nb.zoo.at("x")), m + 2);
            auto ey = evolve(c, Distribution::point(c.size(), nb.zoo.at("y")), m + 2);
            CHECK(ex == lx);
            CHECK(ey == ly);
        }
    }
    auto nb = nb_chain(1, Rational(1, 2));
    const auto& c = nb.zoo.chain;
    auto ly = limit_distribution(c, Distribution::point(c.size(), nb.zoo.at("y")));
    CHECK(ly[c.index_of("0")] == Rational(1, 4));
    CHECK(ly[c.index_of("1")] == Rational(1, 4));
    CHECK(ly[c.index_of(">")] == Rational(1, 2));

    auto nb4 = nb_chain(4, Rational(4, 5));
    const auto& c4 = nb4.zoo.chain;
    CHECK(tv_distance(limit_distribution(c4, Distribution::point(c4.size(), nb4.zoo.at("x"))),
                      limit_distribution(c4, Distribution::point(c4.size(), nb4.zoo.at("y")))) ==
          Rational(1024, 3125));
    CHECK_THROWS_AS(nb_chain(0, Rational(1, 2)), DomainError);
}

TEST_CASE("birth-and-death chain")
{
    auto one = birth_death_chain(1, Rational(1, 3)).chain;
    auto two = two_state_chain(Rational(1, 3)).chain;
    CHECK(oracle::dense(one) == oracle::dense(two));

    auto bd = birth_death_chain(2, Rational(1, 10)).chain;
    oracle::Dense expect{{Rational(9, 10), Rational(1, 10), 0},
                         {Rational(1, 2), 0, Rational(1, 2)},
                         {0, Rational(1, 10), Rational(9, 10)}};
    CHECK(oracle::dense(bd) == expect);

    // From an interior state the walk exits on the far side with
    // probability given by the gambler's ruin: starting at 1 on {0..L}
    // it reaches L before 0 with probability 1/L.
    for (std::size_t L : {2u, 3u, 5u}) {
        auto c = birth_death_chain(L, Rational(1, 3)).chain;
        auto P = oracle::dense(c);
        P[0] = std::vector<Rational>(L + 1);
        P[0][0] = 1;
        P[L] = std::vector<Rational>(L + 1);
        P[L][L] = 1;
        auto absorbed = MarkovChain::from_dense(c.states(), P);
        auto lim = limit_distribution(absorbed, Distribution::point(L + 1, 1));
        CHECK(lim[L] == Rational(1, static_cast<long>(L)));
    }
    CHECK_THROWS_AS(birth_death_chain(0, Rational(1, 2)), DomainError);
}

TEST_CASE("lower-bound chain")
{
    auto small = lower_bound_chain(1, 0.05, 100);
    CHECK(small.alpha_float == doctest::Approx(0.5 * (std::log(2.0) + 0.05) * 2 / 100).epsilon(1e-14));
    CHECK(std::abs(to_double(small.alpha) - small.alpha_float) <=
          small.alpha_float * alpha_snap_tolerance);
    CHECK(small.alpha_float == doctest::Approx(0.00743).epsilon(1e-3));

    auto big = lower_bound_chain(8, 0.05, 40000);
    CHECK(big.alpha_float == doctest::Approx(8.39e-5).epsilon(1e-3));
    CHECK(kappa_target(8, 0.05) == doctest::Approx(0.432).epsilon(1e-2));
    CHECK(big.base.chain.size() == 9);

    auto lay = lower_bound_chain(2, 0.05, 6).layered();
    CHECK(lay.layered.size() == 21);

    CHECK_THROWS_AS(lower_bound_chain(1, 1000.0, 100), DomainError);
    CHECK_THROWS_AS(lower_bound_chain(1, -0.1, 100), DomainError);
    CHECK_THROWS_AS(lower_bound_chain(0, 0.05, 100), DomainError);
}

}
