#pragma once

#include "segchain/chain.hpp"
#include "segchain/meetflow.hpp"

#include <optional>
#include <string>
#include <vector>

namespace segchain {

// Negative binomial pmf: successes before the r-th failure, success
// probability p. r is 1 or 2; 0 <= p < 1.
Rational nb_pmf(unsigned r, const Rational& p, std::uint64_t k);

// Total variation between NB(1,p) and NB(2,p):
// (m+1)(1-p)p^(m+1) with m = floor(p/(1-p)). Requires 0 <= p < 1.
Rational tv_nb(const Rational& p);

// e^(-A/x) + e^(-A/(1-x)) on 0 < x < 1.
double f_A(double A, double x);
// sup over x of f_A: max(e^-A, 2e^-2A). Throws DomainError unless A > 0.
double f_sup(double A);

// Leading terms for the birth-and-death chain on {0..L}.
double bd_p00_approx(std::size_t L, double alpha, std::size_t t);
double bd_tv_approx(std::size_t L, double alpha, std::size_t t);
double bd_confine_approx(std::size_t k, double alpha, std::size_t t);

// max(1, f_sup(alpha T / (L+1))).
double best_constant_separation_bound(std::size_t L, double alpha, std::size_t T);

// e^(-(ln 2 + delta)(L+1)/L).
double kappa_target(std::size_t L, double delta);

struct KappaOptions {
    Execution execution = Execution::serial;
    // Full duality is attempted only within these budgets.
    DualityOptions duality{.trajectory_cap = 20000, .leaf_budget = std::uint64_t{1} << 22};
};

struct KappaReport {
    std::size_t L;
    double delta;
    std::size_t T;
    Rational alpha;
    double alpha_float;
    State x;
    State y;
    Rational tv_exact;
    double tv_kept;
    double target;
    Rational max_constant_separation;
    std::size_t best_k;
    bool constants_below_one;
    bool duality_verified;
    std::optional<Rational> optimal_meeting; // C_T when duality ran
    bool meeting_certified;                  // C_T == 1, certified by duality
    std::string evidence;
};

KappaReport kappa_experiment(std::size_t L, double delta, std::size_t T,
                             const KappaOptions& options = {});

struct SweepRow {
    std::string params;
    Rational exact;
    double approx;
    double residual; // exact - approx
};

// Exact birth-and-death quantities against their leading terms at each t:
// the largest interior mass P^t(0,i) (against the bound 2 alpha), P^t(0,0),
// the TV between the endpoint starts, and every confinement probability.
std::vector<SweepRow> bd_asymptotics_sweep(std::size_t L, const Rational& alpha,
                                           std::vector<std::size_t> times,
                                           Execution exec = Execution::serial);

// TV of the absorption laws of the NB chain against tv_nb, for each p.
std::vector<SweepRow> nb_sweep(const std::vector<Rational>& ps);

} // namespace segchain
