#include "segchain/fuzz.hpp"

#include "segchain/errors.hpp"

#include <exception>

namespace segchain {

MarkovChain random_chain(std::mt19937_64& rng, std::size_t states, unsigned numerator_bound)
{
    if (states == 0 || numerator_bound == 0)
        throw DomainError("random_chain: need at least one state and a positive bound");
    std::uniform_int_distribution<unsigned> draw(0, numerator_bound);
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> matrix(states, std::vector<Rational>(states));
    for (std::size_t i = 0; i < states; ++i) {
        labels.push_back(std::to_string(i));
        std::vector<unsigned> w(states);
        unsigned sum = 0;
        while (sum == 0) {
            sum = 0;
            for (auto& v : w) {
                v = draw(rng);
                sum += v;
            }
        }
        for (std::size_t j = 0; j < states; ++j) {
            matrix[i][j] = Rational(w[j], sum);
            matrix[i][j].canonicalize();
        }
    }
    return MarkovChain::from_dense(std::move(labels), matrix);
}

FuzzInstance make_fuzz_instance(const FuzzOptions& options, std::size_t index)
{
    if (options.max_states == 0 || options.max_T == 0)
        throw DomainError("fuzz: max_states and max_T must be positive");
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> n_draw(1, options.max_states);
    std::size_t n = n_draw(rng);
    std::uniform_int_distribution<std::size_t> t_draw(1, options.max_T);
    std::size_t T = t_draw(rng);
    std::uniform_int_distribution<State> s_draw(0, n - 1);
    State x = s_draw(rng);
    State y = s_draw(rng);
    return {index, random_chain(rng, n, options.numerator_bound), x, y, T};
}

FuzzResult run_fuzz_instance(const FuzzInstance& inst, const DualityOptions& duality)
{
    const auto& chain = inst.chain;
    auto net = build_flow_network(
        enumerate_trajectories(chain, inst.x, inst.T, duality.trajectory_cap),
        enumerate_trajectories(chain, inst.y, inst.T, duality.trajectory_cap),
        duality.execution);
    auto flow = max_flow(net);
    auto plan = extract_coupling(net, flow);
    auto coupling = plan.to_trajectory_coupling(chain);
    auto mtd = meeting_time_distribution(coupling, inst.T);

    BruteForceOptions bf;
    bf.leaf_budget = duality.leaf_budget;
    bf.execution = duality.execution;
    auto best = brute_force_optimal_separation(chain, inst.x, inst.y, inst.T, bf);
    if (!best)
        throw InvariantViolation("fuzz: brute force found no sequence");

    FuzzResult r{inst.index, chain.size(), inst.x, inst.y, inst.T,
                 flow.value, best->report.value, mtd.cdf.back(), false, true};
    r.duality_holds = r.max_flow == 2 - r.separation && r.meeting == r.max_flow &&
                      plan.meeting_probability() == r.meeting;
    for (std::size_t n = 0; n <= inst.T; ++n)
        if (!segregation_bound_check(chain, inst.x, inst.y, mtd, n).pass)
            r.bounds_hold = false;
    return r;
}

std::vector<FuzzResult> run_duality_fuzz(const FuzzOptions& options)
{
    std::vector<FuzzResult> results(options.instances);
    DualityOptions per_instance = options.duality;
    per_instance.execution = Execution::serial;
    auto one = [&](std::size_t i) {
        results[i] = run_fuzz_instance(make_fuzz_instance(options, i), per_instance);
    };
    if (options.execution == Execution::serial) {
        for (std::size_t i = 0; i < options.instances; ++i)
            one(i);
        return results;
    }
    std::exception_ptr failure;
    const long count = static_cast<long>(options.instances);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        try {
            one(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(segchain_fuzz_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

} // namespace segchain
