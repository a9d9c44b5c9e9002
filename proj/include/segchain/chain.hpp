#pragma once

#include "segchain/rational.hpp"
#include "segchain/state_set.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace segchain {

struct Transition {
    State to;
    Rational p;
};

// Finite Markov chain with an exact row-stochastic kernel. Rows are stored
// sparsely; only positive entries are kept, sorted by target.
class MarkovChain {
public:
    // Zero entries may be omitted and repeated targets are summed. Throws
    // ParseError when labels repeat, an entry is outside [0,1] or a row
    // does not sum to exactly one (the message names the row).
    MarkovChain(std::vector<std::string> states,
                std::vector<std::vector<Transition>> rows);

    static MarkovChain from_dense(std::vector<std::string> states,
                                  const std::vector<std::vector<Rational>>& matrix);

    std::size_t size() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }
    const std::string& label(State s) const { return states_.at(s); }

    std::optional<State> find(std::string_view label) const;
    // Throws ParseError on an unknown label.
    State index_of(std::string_view label) const;

    std::span<const Transition> row(State from) const { return rows_.at(from); }
    Rational operator()(State from, State to) const;
    bool is_absorbing(State s) const;

private:
    std::vector<std::string> states_;
    std::vector<std::vector<Transition>> rows_;
    std::unordered_map<std::string, State> index_;
};

// Exact probability vector aligned with a chain's state order.
class Distribution {
public:
    // Throws ParseError unless the weights are non-negative and sum to 1.
    explicit Distribution(std::vector<Rational> weights);

    static Distribution point(std::size_t n, State s);
    static Distribution uniform(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    const Rational& operator[](State s) const { return weights_[s]; }
    std::span<const Rational> weights() const { return weights_; }

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<Rational> weights_;
};

// P^n applied to `start`.
Distribution evolve(const MarkovChain& chain, const Distribution& start, std::size_t steps);

// sup_A |mu(A) - nu(A)|, computed as the one-sided sum over mu >= nu.
Rational tv_distance(const Distribution& mu, const Distribution& nu);

// max over ordered pairs (x, y) of || P^n(x,.) - P^n(y,.) ||.
Rational d_bar(const MarkovChain& chain, std::size_t n);

// max over x of || P^n(x,.) - pi ||; pi is supplied by the caller.
Rational d(const MarkovChain& chain, const Distribution& pi, std::size_t n);

// Smallest n with d(n) <= 1/4. Throws BudgetExceeded past `cap`.
std::size_t mixing_time(const MarkovChain& chain, const Distribution& pi,
                        std::size_t cap = 100000);

// The chain stopped at time T, unrolled into generations: state (s, n) is
// stored at index n * |S| + s and labelled "<s>@<n>"; layer T is absorbing.
struct TimeLayeredChain {
    MarkovChain base;
    std::size_t horizon;
    MarkovChain layered;

    State index(State s, std::size_t layer) const { return layer * base.size() + s; }
};

TimeLayeredChain time_layer(const MarkovChain& chain, std::size_t horizon);

// lim_n P^n(start, .) for chains whose closed classes are all single
// absorbing states. Throws DomainError otherwise (a closed class with two
// or more states may be periodic, so the state-wise limit need not exist).
Distribution limit_distribution(const MarkovChain& chain, const Distribution& start);

} // namespace segchain
