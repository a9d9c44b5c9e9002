#pragma once

#include "segchain/chain.hpp"
#include "segchain/propagation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace segchain {

// A_0, ..., A_T over one chain's state space.
class SeparatingSequence {
public:
    explicit SeparatingSequence(std::vector<StateSet> sets);

    static SeparatingSequence constant(const StateSet& set, std::size_t horizon);
    static SeparatingSequence from_masks(std::size_t universe, std::span<const std::uint64_t> masks);

    std::size_t horizon() const { return sets_.size() - 1; }
    std::size_t universe() const { return sets_.front().universe(); }
    const StateSet& at(std::size_t t) const { return sets_[t]; }
    const std::vector<StateSet>& sets() const { return sets_; }
    std::vector<std::uint64_t> masks() const;

    friend bool operator==(const SeparatingSequence&, const SeparatingSequence&) = default;

private:
    std::vector<StateSet> sets_;
};

struct SeparationReport {
    Rational value;
    Rational summand_x; // P(X_t in A_t for all t | X_0 = x)
    Rational summand_y; // P(X_t not in A_t for all t | X_0 = y)
    bool nontrivial;
};

SeparationReport separation_value(const MarkovChain& chain, State x, State y,
                                  const SeparatingSequence& seq);

// A^a_t = A_{(t + a) mod (T+1)}. Throws DomainError unless 0 <= a <= T.
SeparatingSequence cyclic_shift(const SeparatingSequence& seq, std::size_t offset);

// Per-time restrictions on the enumerated sets (bitmasks over states).
struct SequenceConstraint {
    std::uint64_t must_include = 0;
    std::uint64_t must_exclude = 0;
};

struct BruteForceOptions {
    bool restrict_nontrivial = false;
    std::uint64_t leaf_budget = std::uint64_t{1} << 26;
    std::optional<SequenceConstraint> constraint;
    Execution execution = Execution::serial;
};

struct OptimalSeparation {
    SeparationReport report;
    SeparatingSequence sequence;
    std::uint64_t leaves = 0; // evaluated leaves of the search tree
};

// Exact maximum of the separation over all sequences (or over non-trivial
// ones). Depth-first over time carrying the two confined vectors; states
// that neither vector can reach are left out of A_t (they cannot affect the
// value), and branches where both vectors vanish are cut. Among maximizers,
// the lexicographically smallest bitmask sequence is returned. The parallel
// execution splits on A_0 and merges with the same rule, so both executions
// return identical results. Returns nullopt only when restricting to
// non-trivial sequences and none exists. Requires |S| <= 30; throws
// BudgetExceeded past the leaf budget.
std::optional<OptimalSeparation> brute_force_optimal_separation(const MarkovChain& chain, State x,
                                                                State y, std::size_t horizon,
                                                                const BruteForceOptions& options = {});

// Calls `visit(masks, report)` for every sequence satisfying the constraint
// (no pruning, no reduction). Requires |S| <= 30.
using SequenceVisitor =
    std::function<void(std::span<const std::uint64_t> masks, const SeparationReport& report)>;
std::uint64_t for_each_separation(const MarkovChain& chain, State x, State y, std::size_t horizon,
                                  const SequenceConstraint& constraint, const SequenceVisitor& visit,
                                  std::uint64_t leaf_budget = std::uint64_t{1} << 26);

// Constant sequence A_t = {0, ..., k} on a birth-and-death chain over
// {0, ..., L}, started from 0 and L. Each summand is a substochastic power
// over one block. Throws DomainError unless k < L.
SeparationReport constant_threshold_separation(const MarkovChain& bd_chain, std::size_t horizon,
                                               std::size_t k, Execution exec = Execution::serial);

// Confinement probability P(X_t in allowed for all 0 <= t <= T | X_0 = start).
Rational confinement_probability(const MarkovChain& chain, State start, const StateSet& allowed,
                                 std::size_t horizon, Execution exec = Execution::serial);

// x in A_t and y not in A_t for every t.
bool boundary_structure_check(const SeparatingSequence& seq, State x, State y);

} // namespace segchain
