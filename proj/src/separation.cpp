#include "segchain/separation.hpp"

#include "segchain/errors.hpp"

#include <algorithm>
#include <atomic>

namespace segchain {

SeparatingSequence::SeparatingSequence(std::vector<StateSet> sets) : sets_(std::move(sets))
{
    if (sets_.empty())
        throw DimensionMismatch("separating sequence needs at least A_0");
    for (auto& s : sets_)
        if (s.universe() != sets_.front().universe())
            throw DimensionMismatch("separating sequence mixes state spaces");
}

SeparatingSequence SeparatingSequence::constant(const StateSet& set, std::size_t horizon)
{
    return SeparatingSequence(std::vector<StateSet>(horizon + 1, set));
}

SeparatingSequence SeparatingSequence::from_masks(std::size_t universe,
                                                  std::span<const std::uint64_t> masks)
{
    std::vector<StateSet> sets;
    sets.reserve(masks.size());
    for (auto m : masks)
        sets.push_back(StateSet::from_mask(universe, m));
    return SeparatingSequence(std::move(sets));
}

std::vector<std::uint64_t> SeparatingSequence::masks() const
{
    std::vector<std::uint64_t> out;
    out.reserve(sets_.size());
    for (auto& s : sets_)
        out.push_back(s.mask());
    return out;
}

namespace {

SeparationReport make_report(Rational sx, Rational sy)
{
    bool nontrivial = sgn(sx) > 0 && sgn(sy) > 0;
    Rational value = sx + sy;
    return {value, std::move(sx), std::move(sy), nontrivial};
}

Rational confined_mass(const IntegerKernel& kernel, State start,
                       const std::vector<StateSet>& sets, Execution exec)
{
    auto v = ScaledVector::point(kernel.size(), start);
    v.restrict_to(sets[0]);
    for (std::size_t t = 1; t < sets.size(); ++t) {
        if (v.is_zero())
            return 0;
        v.advance_within(kernel, sets[t], exec);
    }
    return v.total();
}

} // namespace

SeparationReport separation_value(const MarkovChain& chain, State x, State y,
                                  const SeparatingSequence& seq)
{
    if (seq.universe() != chain.size())
        throw DimensionMismatch("separation_value: sequence over a different state space");
    if (x >= chain.size() || y >= chain.size())
        throw DimensionMismatch("separation_value: start state out of range");
    IntegerKernel kernel(chain);
    std::vector<StateSet> complements;
    for (auto& s : seq.sets())
        complements.push_back(s.complement());
    return make_report(confined_mass(kernel, x, seq.sets(), Execution::serial),
                       confined_mass(kernel, y, complements, Execution::serial));
}

SeparatingSequence cyclic_shift(const SeparatingSequence& seq, std::size_t offset)
{
    const std::size_t len = seq.horizon() + 1;
    if (offset >= len)
        throw DomainError("cyclic_shift: offset must lie in [0, T]");
    std::vector<StateSet> sets;
    sets.reserve(len);
    for (std::size_t t = 0; t < len; ++t)
        sets.push_back(seq.at((t + offset) % len));
    return SeparatingSequence(std::move(sets));
}

// ------------------------------------------------------------ brute force

namespace {

using Numerators = std::vector<mpz_class>;

std::uint64_t support_mask(const Numerators& v)
{
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (sgn(v[i]) != 0)
            m |= std::uint64_t{1} << i;
    return m;
}

bool all_zero(const Numerators& v)
{
    return std::all_of(v.begin(), v.end(), [](const mpz_class& z) { return sgn(z) == 0; });
}

mpz_class sum_of(const Numerators& v)
{
    mpz_class s = 0;
    for (auto& z : v)
        s += z;
    return s;
}

void multiply(const IntegerKernel& k, const Numerators& v, Numerators& out)
{
    out.assign(v.size(), mpz_class(0));
    for (std::size_t j = 0; j < v.size(); ++j) {
        mpz_class& acc = out[j];
        for (auto& e : k.column(j)) {
            const mpz_class& src = v[e.from];
            if (sgn(src) == 0)
                continue;
            if (e.fits_ulong)
                mpz_addmul_ui(acc.get_mpz_t(), src.get_mpz_t(), e.small_weight);
            else
                mpz_addmul(acc.get_mpz_t(), src.get_mpz_t(), e.weight.get_mpz_t());
        }
    }
}

void restrict_mask(Numerators& v, std::uint64_t keep)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!((keep >> i) & 1u))
            v[i] = 0;
}

struct Candidate {
    bool found = false;
    mpz_class value;  // numerator over D^T
    mpz_class sx, sy; // numerators over D^T
    std::vector<std::uint64_t> masks;

    // Strictly better: larger value. Ties keep the earlier (lexicographically
    // smaller) candidate because the search visits sequences in that order.
    bool improves_on(const Candidate& other) const
    {
        return found && (!other.found || value > other.value);
    }
};

// One search node: A_0..A_t chosen, vectors confined accordingly.
struct Node {
    std::size_t t;
    Numerators vx, vy;
    std::vector<std::uint64_t> masks;
};

class Search {
public:
    Search(const MarkovChain& chain, std::size_t horizon, const BruteForceOptions& opts,
           std::atomic<std::uint64_t>& leaves)
        : kernel_(chain), n_(chain.size()), horizon_(horizon), opts_(opts), leaves_(leaves)
    {
        denom_pow_.resize(horizon + 1);
        denom_pow_[0] = 1;
        for (std::size_t t = 1; t <= horizon; ++t)
            denom_pow_[t] = denom_pow_[t - 1] * kernel_.denominator();
        full_ = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    }

    Node root(State x, State y) const
    {
        Node r{0, Numerators(n_, mpz_class(0)), Numerators(n_, mpz_class(0)), {}};
        r.vx[x] = 1;
        r.vy[y] = 1;
        return r;
    }

    // Calls `child(node)` for every admissible choice of the next set, in
    // increasing mask order. `node.t` is the number of sets already chosen.
    template <class F>
    void expand(const Node& node, F&& child) const
    {
        Numerators px, py;
        if (node.t == 0) {
            px = node.vx;
            py = node.vy;
        } else {
            multiply(kernel_, node.vx, px);
            multiply(kernel_, node.vy, py);
        }
        std::uint64_t relevant = support_mask(px) | support_mask(py);
        std::uint64_t base = 0, free = relevant;
        if (opts_.constraint) {
            base = opts_.constraint->must_include;
            free &= ~(opts_.constraint->must_include | opts_.constraint->must_exclude);
        }
        std::uint64_t sub = 0;
        for (;;) {
            std::uint64_t mask = base | sub;
            Node next{node.t + 1, px, py, node.masks};
            restrict_mask(next.vx, mask);
            restrict_mask(next.vy, full_ & ~mask);
            next.masks.push_back(mask);
            child(std::move(next));
            if (sub == free)
                break;
            sub = (sub - free) & free;
        }
    }

    // Best completion of the subtree below `node` (node.t sets chosen).
    Candidate solve(const Node& node) const
    {
        Candidate best;
        visit(node, best);
        return best;
    }

    void visit(const Node& node, Candidate& best) const
    {
        bool zx = all_zero(node.vx);
        bool zy = all_zero(node.vy);
        if (node.t > 0) {
            if (zx && zy)
                return;
            if (opts_.restrict_nontrivial && (zx || zy))
                return;
            if (node.t == horizon_ + 1) {
                count_leaf();
                Candidate c{true, 0, sum_of(node.vx), sum_of(node.vy), node.masks};
                c.value = c.sx + c.sy;
                if (c.improves_on(best))
                    best = std::move(c);
                return;
            }
            if (!opts_.constraint && (zx || zy)) {
                count_leaf();
                Candidate c = finish_alone(node, zy);
                if (c.improves_on(best))
                    best = std::move(c);
                return;
            }
        }
        expand(node, [&](Node child) { visit(child, best); });
    }

    // Collects the nodes at `depth` (or terminal earlier) in lexicographic order.
    void frontier(const Node& node, std::size_t depth, std::vector<Node>& out) const
    {
        if (node.t >= depth || node.t == horizon_ + 1) {
            out.push_back(node);
            return;
        }
        if (node.t > 0 && (all_zero(node.vx) || all_zero(node.vy))) {
            out.push_back(node);
            return;
        }
        expand(node, [&](Node child) { frontier(child, depth, out); });
    }

private:
    // Only one copy still carries mass: its best continuation keeps all of
    // it, and the smallest masks doing so are the support (x side) or the
    // empty set (y side).
    Candidate finish_alone(const Node& node, bool x_alone) const
    {
        Candidate c;
        c.found = true;
        c.masks = node.masks;
        Numerators v = x_alone ? node.vx : node.vy;
        Numerators next;
        for (std::size_t t = node.t; t <= horizon_; ++t) {
            multiply(kernel_, v, next);
            v.swap(next);
            c.masks.push_back(x_alone ? support_mask(v) : 0);
        }
        mpz_class scaled = sum_of(x_alone ? node.vx : node.vy) * denom_pow_[horizon_ + 1 - node.t];
        (x_alone ? c.sx : c.sy) = scaled;
        (x_alone ? c.sy : c.sx) = 0;
        c.value = scaled;
        return c;
    }

    void count_leaf() const
    {
        if (leaves_.fetch_add(1, std::memory_order_relaxed) + 1 > opts_.leaf_budget)
            throw BudgetExceeded("brute-force separation exceeded the enumeration budget of " +
                                 std::to_string(opts_.leaf_budget) + " leaves");
    }

    IntegerKernel kernel_;
    std::size_t n_;
    std::size_t horizon_;
    const BruteForceOptions& opts_;
    std::atomic<std::uint64_t>& leaves_;
    std::vector<mpz_class> denom_pow_;
    std::uint64_t full_;
};

} // namespace

std::optional<OptimalSeparation> brute_force_optimal_separation(const MarkovChain& chain, State x,
                                                                State y, std::size_t horizon,
                                                                const BruteForceOptions& options)
{
    if (chain.size() > 30)
        throw BudgetExceeded("brute-force separation supports at most 30 states");
    if (x >= chain.size() || y >= chain.size())
        throw DimensionMismatch("brute_force_optimal_separation: start state out of range");

    std::atomic<std::uint64_t> leaves{0};
    Search search(chain, horizon, options, leaves);
    Node root = search.root(x, y);

    Candidate best;
    if (options.execution == Execution::serial) {
        best = search.solve(root);
    } else {
        std::vector<Node> tasks;
        std::size_t depth = 1;
        while (true) {
            tasks.clear();
            search.frontier(root, depth, tasks);
            if (tasks.size() >= 64 || depth > horizon)
                break;
            ++depth;
        }
        std::vector<Candidate> results(tasks.size());
        std::exception_ptr failure;
        const long count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < count; ++i) {
            try {
                results[static_cast<std::size_t>(i)] = search.solve(tasks[static_cast<std::size_t>(i)]);
            } catch (...) {
#pragma omp critical(segchain_bf_failure)
                if (!failure)
                    failure = std::current_exception();
            }
        }
        if (failure)
            std::rethrow_exception(failure);
        for (auto& c : results)
            if (c.improves_on(best))
                best = std::move(c);
    }

    if (!best.found)
        return std::nullopt;
    mpz_class denom = 1;
    IntegerKernel k(chain);
    for (std::size_t t = 0; t < horizon; ++t)
        denom *= k.denominator();
    Rational sx(best.sx, denom), sy(best.sy, denom);
    sx.canonicalize();
    sy.canonicalize();
    return OptimalSeparation{make_report(sx, sy),
                             SeparatingSequence::from_masks(chain.size(), best.masks),
                             leaves.load()};
}

std::uint64_t for_each_separation(const MarkovChain& chain, State x, State y, std::size_t horizon,
                                  const SequenceConstraint& constraint, const SequenceVisitor& visit,
                                  std::uint64_t leaf_budget)
{
    const std::size_t n = chain.size();
    if (n > 30)
        throw BudgetExceeded("for_each_separation supports at most 30 states");
    IntegerKernel kernel(chain);
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    const std::uint64_t free = full & ~(constraint.must_include | constraint.must_exclude);
    mpz_class denom = 1;
    for (std::size_t t = 0; t < horizon; ++t)
        denom *= kernel.denominator();

    std::uint64_t leaves = 0;
    std::vector<std::uint64_t> masks;
    auto recurse = [&](auto&& self, const Numerators& px, const Numerators& py) -> void {
        std::uint64_t sub = 0;
        for (;;) {
            std::uint64_t mask = constraint.must_include | sub;
            Numerators vx = px, vy = py;
            restrict_mask(vx, mask);
            restrict_mask(vy, full & ~mask);
            masks.push_back(mask);
            if (masks.size() == horizon + 1) {
                if (++leaves > leaf_budget)
                    throw BudgetExceeded("for_each_separation exceeded its leaf budget");
                Rational sx(sum_of(vx), denom), sy(sum_of(vy), denom);
                sx.canonicalize();
                sy.canonicalize();
                visit(masks, make_report(sx, sy));
            } else {
                Numerators nx, ny;
                multiply(kernel, vx, nx);
                multiply(kernel, vy, ny);
                self(self, nx, ny);
            }
            masks.pop_back();
            if (sub == free)
                break;
            sub = (sub - free) & free;
        }
    };
    Numerators vx(n, mpz_class(0)), vy(n, mpz_class(0));
    vx[x] = 1;
    vy[y] = 1;
    recurse(recurse, vx, vy);
    return leaves;
}

Rational confinement_probability(const MarkovChain& chain, State start, const StateSet& allowed,
                                 std::size_t horizon, Execution exec)
{
    if (allowed.universe() != chain.size())
        throw DimensionMismatch("confinement_probability: set over a different state space");
    if (!allowed.contains(start))
        return 0;
    IntegerKernel kernel(chain);
    auto v = ScaledVector::point(chain.size(), start);
    v.advance_steps_within(kernel, allowed, horizon, exec);
    return v.total();
}

SeparationReport constant_threshold_separation(const MarkovChain& bd_chain, std::size_t horizon,
                                               std::size_t k, Execution exec)
{
    if (bd_chain.size() < 2)
        throw DomainError("constant_threshold_separation: chain needs at least two states");
    const std::size_t L = bd_chain.size() - 1;
    if (k >= L)
        throw DomainError("constant_threshold_separation: threshold k must satisfy k < L");
    StateSet low(bd_chain.size());
    for (State s = 0; s <= k; ++s)
        low.insert(s);
    StateSet high = low.complement();
    Rational sx, sy;
    if (exec == Execution::parallel) {
#pragma omp parallel sections
        {
#pragma omp section
            sx = confinement_probability(bd_chain, 0, low, horizon, Execution::serial);
#pragma omp section
            sy = confinement_probability(bd_chain, L, high, horizon, Execution::serial);
        }
    } else {
        sx = confinement_probability(bd_chain, 0, low, horizon, exec);
        sy = confinement_probability(bd_chain, L, high, horizon, exec);
    }
    return make_report(sx, sy);
}

bool boundary_structure_check(const SeparatingSequence& seq, State x, State y)
{
    for (auto& s : seq.sets())
        if (!s.contains(x) || s.contains(y))
            return false;
    return true;
}

} // namespace segchain
