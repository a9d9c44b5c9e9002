#pragma once

#include "segchain/chain.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace segchain {

using Path = std::vector<State>;

struct PairState {
    State x;
    State y;
    friend auto operator<=>(const PairState&, const PairState&) = default;
};

struct JointTransition {
    State x;
    State y;
    Rational p;
};

// One step of a pair chain: a stochastic kernel (x, y) -> (x', y') on S x S.
class JointKernel {
public:
    // Every row empty; fill with set_row before wrapping in a coupling.
    explicit JointKernel(std::size_t states);

    // Product of two independent copies of `chain`.
    static JointKernel independent(const MarkovChain& chain);

    std::size_t states() const { return n_; }
    std::span<const JointTransition> row(State x, State y) const { return rows_.at(x * n_ + y); }
    void set_row(State x, State y, std::vector<JointTransition> row);

private:
    std::size_t n_;
    std::vector<std::vector<JointTransition>> rows_;
};

// Markovian coupling of two copies of a chain. Either one kernel used at
// every step, or one kernel per step (time-inhomogeneous pair chains).
class MarkovianCouplingKernel {
public:
    // Throws ParseError when a row is empty, does not sum to 1, or refers to
    // states outside the chain.
    MarkovianCouplingKernel(MarkovChain chain, JointKernel kernel);
    MarkovianCouplingKernel(MarkovChain chain, std::vector<JointKernel> per_step);

    const MarkovChain& chain() const { return chain_; }
    bool time_homogeneous() const { return homogeneous_; }
    const std::vector<JointKernel>& steps() const { return steps_; }
    // Kernel used for the transition t -> t+1. Throws DimensionMismatch past
    // the last step of a time-dependent coupling.
    const JointKernel& at_step(std::size_t t) const;
    // Largest horizon this coupling defines (unbounded when homogeneous).
    std::optional<std::size_t> max_horizon() const;

private:
    MarkovChain chain_;
    std::vector<JointKernel> steps_;
    bool homogeneous_;
};

// Joint law of (X-trajectory, Y-trajectory) over a finite horizon, with
// X_0 = x and Y_0 = y fixed.
class TrajectoryCoupling {
public:
    using Masses = std::map<std::pair<Path, Path>, Rational>;

    // Validates total mass 1 and both path marginals exactly; throws
    // InvariantViolation with a witness otherwise.
    TrajectoryCoupling(MarkovChain chain, State x, State y, std::size_t horizon, Masses masses);

    const MarkovChain& chain() const { return chain_; }
    State x() const { return x_; }
    State y() const { return y_; }
    std::size_t horizon() const { return horizon_; }
    const Masses& masses() const { return masses_; }

private:
    MarkovChain chain_;
    State x_;
    State y_;
    std::size_t horizon_;
    Masses masses_;
};

// cdf[t] = P(tau <= t) for t = 0..horizon, tau the first meeting time.
struct MeetingTimeDistribution {
    std::vector<Rational> cdf;
    std::size_t horizon() const { return cdf.empty() ? 0 : cdf.size() - 1; }
};

Rational path_probability(const MarkovChain& chain, std::span<const State> path);

struct MarginalReport {
    bool correct = true;
    std::string witness; // empty when correct
};

// Exact path-level check: the law of (X_0..X_T) under the coupling equals the
// chain's path law from x, and likewise for Y from y.
MarginalReport check_marginals(const MarkovianCouplingKernel& kernel, State x, State y,
                               std::size_t horizon);
MarginalReport check_marginals(const MarkovChain& chain, State x, State y, std::size_t horizon,
                               const TrajectoryCoupling::Masses& masses);

// The one-step aggregate conditions every coupling satisfies: for each n,
// sum over y_n of P(X_{n+1}=x' | X_n=x_n, Y_n=y_n) P(Y_n=y_n | X_n=x_n)
// equals P(x_n, x'), and symmetrically for Y.
MarginalReport check_aggregate_marginals(const MarkovianCouplingKernel& kernel, State x, State y,
                                         std::size_t horizon);

struct FaithfulnessWitness {
    std::size_t step;
    PairState from;
    char coordinate; // 'X' or 'Y'
    State successor;
    Rational coupled;
    Rational base;
};

struct FaithfulnessResult {
    bool faithful = true;
    std::optional<FaithfulnessWitness> witness;
};

// Checks that at each pair state the X-move has law P(x, .) and the Y-move
// has law P(y, .). With `start`, only pair states reachable from it within
// `horizon` steps are inspected; without it, every row of every step is.
FaithfulnessResult check_faithful(const MarkovianCouplingKernel& kernel,
                                  std::optional<PairState> start = std::nullopt,
                                  std::size_t horizon = 0);

std::string describe(const FaithfulnessWitness& w, const MarkovChain& chain);

// On diagonal pairs (s, s) both copies move together by P(s, .); every other
// row is kept. Throws DomainError when the input is not faithful (gluing a
// non-faithful coupling can break the marginals).
MarkovianCouplingKernel make_sticky(const MarkovianCouplingKernel& kernel,
                                    std::optional<PairState> start = std::nullopt,
                                    std::size_t horizon = 0);

// Exact forward propagation over (pair state, met flag).
MeetingTimeDistribution meeting_time_distribution(const MarkovianCouplingKernel& kernel, State x,
                                                  State y, std::size_t horizon);
// Throws DimensionMismatch when horizon exceeds the coupling's.
MeetingTimeDistribution meeting_time_distribution(const TrajectoryCoupling& coupling,
                                                  std::size_t horizon);

// P(the copies meet by T and differ at some later time <= T).
Rational separation_after_meeting(const MarkovianCouplingKernel& kernel, State x, State y,
                                  std::size_t horizon);

// Enumerates the joint trajectory law of a Markovian coupling.
TrajectoryCoupling to_trajectory_coupling(const MarkovianCouplingKernel& kernel, State x, State y,
                                          std::size_t horizon);

struct BoundReport {
    Rational tv;
    Rational bound;
    bool pass;
};

// || P^n(x,.) - P^n(y,.) || <= 1 - P(tau <= n); valid for faithful couplings.
BoundReport coupling_inequality_check(const MarkovChain& chain, State x, State y,
                                      const MeetingTimeDistribution& mtd, std::size_t n);

// || P^n(x,.) - P^n(y,.) || <= 1 - P(tau <= n) / 2; valid for any coupling.
BoundReport segregation_bound_check(const MarkovChain& chain, State x, State y,
                                    const MeetingTimeDistribution& mtd, std::size_t n);

// n * ceil(log(1/4) / log(1 - alpha/2)). The ceiling is certified: it is the
// least k with (1 - alpha/2)^k <= 1/4, decided in exact arithmetic whenever
// the floating estimate is close to an integer. Throws DomainError for
// alpha outside (0, 1].
std::uint64_t tmix_upper_bound(std::uint64_t n, const Rational& alpha);

} // namespace segchain
