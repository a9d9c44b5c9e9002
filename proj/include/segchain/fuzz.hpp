#pragma once

#include "segchain/meetflow.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace segchain {

// Rows draw integer weights uniformly from [0, numerator_bound] (an all-zero
// row is redrawn) and are normalized. States are labelled "0", "1", ...
MarkovChain random_chain(std::mt19937_64& rng, std::size_t states, unsigned numerator_bound);

struct FuzzOptions {
    std::size_t instances = 200;
    std::size_t max_states = 3;
    std::size_t max_T = 4;
    std::uint64_t seed = 1;
    unsigned numerator_bound = 4;
    Execution execution = Execution::serial;
    DualityOptions duality{};
};

struct FuzzInstance {
    std::size_t index;
    MarkovChain chain;
    State x;
    State y;
    std::size_t T;
};

// Instance `index` depends only on (seed, index), never on scheduling.
FuzzInstance make_fuzz_instance(const FuzzOptions& options, std::size_t index);

struct FuzzResult {
    std::size_t index;
    std::size_t states;
    State x;
    State y;
    std::size_t T;
    Rational max_flow;   // C_T
    Rational separation; // brute-force S_T
    Rational meeting;    // extracted coupling, measured
    bool duality_holds;
    bool bounds_hold; // TV(n) <= 1 - P(tau <= n)/2 for the extracted coupling, n <= T
};

FuzzResult run_fuzz_instance(const FuzzInstance& instance, const DualityOptions& duality);

// Results come back ordered by instance index. The parallel execution runs
// instances concurrently, each one serially.
std::vector<FuzzResult> run_duality_fuzz(const FuzzOptions& options);

} // namespace segchain
