#include "segchain/propagation.hpp"

#include "segchain/errors.hpp"

#include <climits>

namespace segchain {

IntegerKernel::IntegerKernel(const MarkovChain& chain) : columns_(chain.size())
{
    denominator_ = 1;
    for (State i = 0; i < chain.size(); ++i)
        for (auto& t : chain.row(i))
            mpz_lcm(denominator_.get_mpz_t(), denominator_.get_mpz_t(), t.p.get_den_mpz_t());

    for (State i = 0; i < chain.size(); ++i) {
        for (auto& t : chain.row(i)) {
            mpz_class w = t.p.get_num() * (denominator_ / t.p.get_den());
            Entry e{static_cast<std::uint32_t>(i), w, 0, false};
            if (mpz_fits_ulong_p(w.get_mpz_t())) {
                e.fits_ulong = true;
                e.small_weight = mpz_get_ui(w.get_mpz_t());
            }
            columns_[t.to].push_back(std::move(e));
        }
    }
}

ScaledVector ScaledVector::point(std::size_t n, State s)
{
    if (s >= n)
        throw DimensionMismatch("ScaledVector::point: state outside the state space");
    ScaledVector v;
    v.numerators_.assign(n, mpz_class(0));
    v.numerators_[s] = 1;
    return v;
}

ScaledVector ScaledVector::from(const Distribution& dist)
{
    ScaledVector v;
    v.denominator_ = 1;
    for (auto& w : dist.weights())
        mpz_lcm(v.denominator_.get_mpz_t(), v.denominator_.get_mpz_t(), w.get_den_mpz_t());
    v.numerators_.reserve(dist.size());
    for (auto& w : dist.weights())
        v.numerators_.push_back(w.get_num() * (v.denominator_ / w.get_den()));
    return v;
}

Rational ScaledVector::at(State s) const
{
    Rational r(numerators_.at(s), denominator_);
    r.canonicalize();
    return r;
}

mpz_class ScaledVector::numerator_total() const
{
    mpz_class sum = 0;
    for (auto& x : numerators_)
        sum += x;
    return sum;
}

Rational ScaledVector::total() const
{
    Rational r(numerator_total(), denominator_);
    r.canonicalize();
    return r;
}

bool ScaledVector::is_zero() const
{
    for (auto& x : numerators_)
        if (sgn(x) != 0)
            return false;
    return true;
}

StateSet ScaledVector::support() const
{
    StateSet s(numerators_.size());
    for (State i = 0; i < numerators_.size(); ++i)
        if (sgn(numerators_[i]) != 0)
            s.insert(i);
    return s;
}

void ScaledVector::restrict_to(const StateSet& allowed)
{
    if (allowed.universe() != numerators_.size())
        throw DimensionMismatch("ScaledVector::restrict_to: set over a different state space");
    for (State i = 0; i < numerators_.size(); ++i)
        if (!allowed.contains(i))
            numerators_[i] = 0;
}

void ScaledVector::advance(const IntegerKernel& kernel, Execution exec)
{
    step(kernel, nullptr, exec);
}

void ScaledVector::advance_within(const IntegerKernel& kernel, const StateSet& allowed,
                                  Execution exec)
{
    if (allowed.universe() != numerators_.size())
        throw DimensionMismatch("ScaledVector::advance_within: set over a different state space");
    step(kernel, &allowed, exec);
}

void ScaledVector::step(const IntegerKernel& kernel, const StateSet* allowed, Execution exec)
{
    if (kernel.size() != numerators_.size())
        throw DimensionMismatch("ScaledVector: kernel and vector sizes differ");
    const long n = static_cast<long>(numerators_.size());
    std::vector<mpz_class> next(numerators_.size());

    auto compute = [&](long j) {
        if (allowed && !allowed->contains(static_cast<State>(j)))
            return;
        mpz_class& acc = next[static_cast<std::size_t>(j)];
        for (auto& e : kernel.column(static_cast<State>(j))) {
            const mpz_class& src = numerators_[e.from];
            if (sgn(src) == 0)
                continue;
            if (e.fits_ulong)
                mpz_addmul_ui(acc.get_mpz_t(), src.get_mpz_t(), e.small_weight);
            else
                mpz_addmul(acc.get_mpz_t(), src.get_mpz_t(), e.weight.get_mpz_t());
        }
    };

    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long j = 0; j < n; ++j)
            compute(j);
    } else {
        for (long j = 0; j < n; ++j)
            compute(j);
    }
    numerators_ = std::move(next);
    denominator_ *= kernel.denominator();
}

namespace {

using Matrix = std::vector<mpz_class>; // row-major n x n

constexpr std::size_t dense_limit = 64;
constexpr std::size_t squaring_threshold = 32;

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t n, Execution exec)
{
    Matrix c(n * n);
    const long cells = static_cast<long>(n * n);
    auto cell = [&](long idx) {
        const std::size_t i = static_cast<std::size_t>(idx) / n;
        const std::size_t j = static_cast<std::size_t>(idx) % n;
        mpz_class& acc = c[static_cast<std::size_t>(idx)];
        for (std::size_t k = 0; k < n; ++k) {
            const mpz_class& x = a[i * n + k];
            const mpz_class& y = b[k * n + j];
            if (sgn(x) != 0 && sgn(y) != 0)
                mpz_addmul(acc.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long idx = 0; idx < cells; ++idx)
            cell(idx);
    } else {
        for (long idx = 0; idx < cells; ++idx)
            cell(idx);
    }
    return c;
}

} // namespace

void ScaledVector::advance_steps(const IntegerKernel& kernel, std::size_t steps, Execution exec)
{
    power_step(kernel, nullptr, steps, exec);
}

void ScaledVector::advance_steps_within(const IntegerKernel& kernel, const StateSet& allowed,
                                        std::size_t steps, Execution exec)
{
    if (allowed.universe() != numerators_.size())
        throw DimensionMismatch("ScaledVector::advance_steps_within: set over a different state space");
    power_step(kernel, &allowed, steps, exec);
}

void ScaledVector::power_step(const IntegerKernel& kernel, const StateSet* allowed,
                              std::size_t steps, Execution exec)
{
    const std::size_t n = numerators_.size();
    if (kernel.size() != n)
        throw DimensionMismatch("ScaledVector: kernel and vector sizes differ");
    if (n > dense_limit || steps < squaring_threshold) {
        for (std::size_t t = 0; t < steps; ++t)
            step(kernel, allowed, exec);
        return;
    }

    // Work on the allowed block only; mass outside it is moved in by one
    // ordinary step first.
    if (allowed) {
        bool inside = true;
        for (State i = 0; i < n; ++i)
            if (!allowed->contains(i) && sgn(numerators_[i]) != 0)
                inside = false;
        if (!inside) {
            step(kernel, allowed, exec);
            --steps;
        }
    }
    std::vector<State> block;
    std::vector<std::size_t> slot(n, n);
    for (State i = 0; i < n; ++i)
        if (!allowed || allowed->contains(i)) {
            slot[i] = block.size();
            block.push_back(i);
        }
    const std::size_t m = block.size();

    Matrix base(m * m);
    for (std::size_t b = 0; b < m; ++b)
        for (auto& e : kernel.column(block[b]))
            if (slot[e.from] < m)
                base[slot[e.from] * m + b] = e.weight;
    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), kernel.denominator().get_mpz_t(), steps);

    std::vector<mpz_class> v(m);
    for (std::size_t b = 0; b < m; ++b)
        v[b] = numerators_[block[b]];
    for (std::size_t left = steps; left > 0;) {
        if (left & 1u) {
            std::vector<mpz_class> next(m);
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < m; ++i)
                    if (sgn(v[i]) != 0 && sgn(base[i * m + j]) != 0)
                        mpz_addmul(next[j].get_mpz_t(), v[i].get_mpz_t(),
                                   base[i * m + j].get_mpz_t());
            v = std::move(next);
        }
        left >>= 1;
        if (left > 0)
            base = multiply(base, base, m, exec);
    }
    for (auto& z : numerators_)
        z = 0;
    for (std::size_t b = 0; b < m; ++b)
        numerators_[block[b]] = std::move(v[b]);
    denominator_ *= scale;
}

std::vector<Rational> ScaledVector::to_rationals() const
{
    std::vector<Rational> out;
    out.reserve(numerators_.size());
    for (State i = 0; i < numerators_.size(); ++i)
        out.push_back(at(i));
    return out;
}

Distribution ScaledVector::to_distribution() const
{
    return Distribution(to_rationals());
}

Rational tv_distance(const ScaledVector& mu, const ScaledVector& nu)
{
    if (mu.size() != nu.size())
        throw DimensionMismatch("tv_distance: vectors of different length");
    // Bring both onto the common denominator mu.den * nu.den (or the shared
    // one when they agree, which is the usual case after equal step counts).
    const bool same = mu.denominator() == nu.denominator();
    mpz_class sum = 0;
    mpz_class a, b;
    for (State i = 0; i < mu.size(); ++i) {
        if (same) {
            if (mu.numerator(i) > nu.numerator(i))
                sum += mu.numerator(i) - nu.numerator(i);
        } else {
            a = mu.numerator(i) * nu.denominator();
            b = nu.numerator(i) * mu.denominator();
            if (a > b)
                sum += a - b;
        }
    }
    Rational r(sum, same ? mu.denominator() : mpz_class(mu.denominator() * nu.denominator()));
    r.canonicalize();
    return r;
}

} // namespace segchain
