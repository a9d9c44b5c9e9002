#pragma once

#include "segchain/chain.hpp"
#include "segchain/chain_io.hpp"
#include "segchain/coupling.hpp"

#include <map>
#include <string>

namespace segchain {

struct ZooChain {
    MarkovChain chain;
    std::map<std::string, State> designated; // role -> state ("x", "y", ...)
    std::map<std::string, std::string> params;

    State at(const std::string& role) const;
    Designation designation() const;
};

// {0, 1} with P(0,1) = P(1,0) = alpha; x = 0, y = 1. Requires 0 < alpha <= 1.
ZooChain two_state_chain(const Rational& alpha);

// Two-state chain with flip probability p, layered to T = 2 and relabelled:
// layer 0 is {x, y}, layer 1 is {0@1, 1@1}, layer 2 is {a, b}.
// Requires 0 < p < 1.
ZooChain haggstrom_chain(const Rational& p);

// 3m+5 states. Main column v0..vm (down with p, right into absorbing j with
// 1-p, vm down into ">"), entered from x in one step. y = w0 heads a second
// column w0..wm whose right moves lead into v_j and whose last down move
// leads into ">". From x the absorbing state is NB(1,p) truncated at m, from
// y it is NB(2,p), both within m+2 steps.
struct NbInstance {
    ZooChain zoo;
    MarkovianCouplingKernel mimicking; // Markovian, not faithful, meets by m+2
};
NbInstance nb_chain(unsigned m, const Rational& p);

// States 0..L; P(0,1) = P(L,L-1) = alpha, interior moves 1/2 either way.
// x = 0, y = L. Requires L >= 1 and 0 < alpha <= 1.
ZooChain birth_death_chain(std::size_t L, const Rational& alpha);

// Birth-and-death chain with alpha = (ln 2 + delta)(L+1) / (2T), snapped to
// the simplest rational within 1e-12 relative. The layered form is built on
// demand: at the horizons of interest it has hundreds of thousands of states
// while every computation only needs the base kernel.
struct LowerBoundInstance {
    ZooChain base;
    std::size_t horizon;
    double delta;
    double alpha_float;
    Rational alpha;

    TimeLayeredChain layered() const;
};
// Throws DomainError unless L >= 1, delta > 0, T >= 1 and alpha < 1.
LowerBoundInstance lower_bound_chain(std::size_t L, double delta, std::size_t T);

inline constexpr double alpha_snap_tolerance = 1e-12;

} // namespace segchain
