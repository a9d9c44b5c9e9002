#pragma once

#include "segchain/chain.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace segchain {

// Kernel rescaled to integers: P(i, j) = weight / denominator, where the
// denominator is the lcm of all entry denominators. Stored by column so a
// propagation step writes each target independently.
class IntegerKernel {
public:
    struct Entry {
        std::uint32_t from;
        mpz_class weight;
        unsigned long small_weight; // valid when fits_ulong
        bool fits_ulong;
    };

    explicit IntegerKernel(const MarkovChain& chain);

    std::size_t size() const { return columns_.size(); }
    const mpz_class& denominator() const { return denominator_; }
    const std::vector<Entry>& column(State to) const { return columns_[to]; }

private:
    mpz_class denominator_;
    std::vector<std::vector<Entry>> columns_;
};

// Non-negative vector with integer numerators over one shared denominator.
// Stepping multiplies the denominator by the kernel's, so no gcd is ever
// taken while propagating; this keeps long horizons (tens of thousands of
// steps) exact and affordable.
class ScaledVector {
public:
    static ScaledVector point(std::size_t n, State s);
    static ScaledVector from(const Distribution& dist);

    std::size_t size() const { return numerators_.size(); }
    const mpz_class& numerator(State s) const { return numerators_[s]; }
    const mpz_class& denominator() const { return denominator_; }

    Rational at(State s) const;
    Rational total() const;
    mpz_class numerator_total() const;
    bool is_zero() const;
    StateSet support() const;

    void restrict_to(const StateSet& allowed);

    // v <- v P.
    void advance(const IntegerKernel& kernel, Execution exec = Execution::serial);
    // v <- (v P) restricted to `allowed`; targets outside are never computed.
    void advance_within(const IntegerKernel& kernel, const StateSet& allowed,
                        Execution exec = Execution::serial);

    // `steps` applications of advance / advance_within. Small state spaces
    // use exact repeated squaring of the dense integer matrix, which is far
    // cheaper than stepping once the horizon reaches the thousands.
    void advance_steps(const IntegerKernel& kernel, std::size_t steps,
                       Execution exec = Execution::serial);
    void advance_steps_within(const IntegerKernel& kernel, const StateSet& allowed,
                              std::size_t steps, Execution exec = Execution::serial);

    std::vector<Rational> to_rationals() const;
    // Requires total() == 1.
    Distribution to_distribution() const;

private:
    void step(const IntegerKernel& kernel, const StateSet* allowed, Execution exec);
    void power_step(const IntegerKernel& kernel, const StateSet* allowed, std::size_t steps,
                    Execution exec);

    std::vector<mpz_class> numerators_;
    mpz_class denominator_{1};
};

Rational tv_distance(const ScaledVector& mu, const ScaledVector& nu);

} // namespace segchain
