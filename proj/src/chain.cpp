#include "segchain/chain.hpp"

#include "segchain/errors.hpp"
#include "segchain/propagation.hpp"

#include <algorithm>
#include <map>

namespace segchain {

MarkovChain::MarkovChain(std::vector<std::string> states,
                         std::vector<std::vector<Transition>> rows)
    : states_(std::move(states))
{
    if (states_.empty())
        throw ParseError("chain has no states");
    if (rows.size() != states_.size())
        throw ParseError("chain has " + std::to_string(states_.size()) + " states but " +
                         std::to_string(rows.size()) + " rows");
    for (State s = 0; s < states_.size(); ++s) {
        if (!index_.emplace(states_[s], s).second)
            throw ParseError("duplicate state label \"" + states_[s] + "\"");
    }

    rows_.resize(rows.size());
    for (State from = 0; from < rows.size(); ++from) {
        std::map<State, Rational> merged;
        for (auto& t : rows[from]) {
            if (t.to >= states_.size())
                throw ParseError("row \"" + states_[from] + "\": target index out of range");
            if (!is_probability(t.p))
                throw ParseError("row \"" + states_[from] + "\": probability " + to_string(t.p) +
                                 " outside [0,1]");
            merged[t.to] += t.p;
        }
        Rational sum = 0;
        for (auto& [to, p] : merged) {
            sum += p;
            if (sgn(p) > 0)
                rows_[from].push_back({to, p});
        }
        if (sum != 1)
            throw ParseError("row \"" + states_[from] + "\" sums to " + to_string(sum) +
                             ", expected 1");
    }
}

MarkovChain MarkovChain::from_dense(std::vector<std::string> states,
                                    const std::vector<std::vector<Rational>>& matrix)
{
    std::vector<std::vector<Transition>> rows(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        if (matrix[i].size() != states.size())
            throw ParseError("dense kernel row " + std::to_string(i) + " has wrong length");
        for (std::size_t j = 0; j < matrix[i].size(); ++j)
            if (sgn(matrix[i][j]) != 0)
                rows[i].push_back({j, matrix[i][j]});
    }
    return MarkovChain(std::move(states), std::move(rows));
}

std::optional<State> MarkovChain::find(std::string_view label) const
{
    auto it = index_.find(std::string(label));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

State MarkovChain::index_of(std::string_view label) const
{
    if (auto s = find(label))
        return *s;
    throw ParseError("unknown state \"" + std::string(label) + "\"");
}

Rational MarkovChain::operator()(State from, State to) const
{
    const auto& r = rows_.at(from);
    auto it = std::lower_bound(r.begin(), r.end(), to,
                               [](const Transition& t, State s) { return t.to < s; });
    if (it != r.end() && it->to == to)
        return it->p;
    return 0;
}

bool MarkovChain::is_absorbing(State s) const
{
    const auto& r = rows_.at(s);
    return r.size() == 1 && r[0].to == s;
}

Distribution::Distribution(std::vector<Rational> weights) : weights_(std::move(weights))
{
    Rational sum = 0;
    for (auto& w : weights_) {
        if (sgn(w) < 0)
            throw ParseError("distribution has a negative weight");
        sum += w;
    }
    if (sum != 1)
        throw ParseError("distribution sums to " + to_string(sum) + ", expected 1");
}

Distribution Distribution::point(std::size_t n, State s)
{
    if (s >= n)
        throw DimensionMismatch("point mass outside the state space");
    std::vector<Rational> w(n);
    w[s] = 1;
    return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t n)
{
    if (n == 0)
        throw DimensionMismatch("uniform distribution on an empty set");
    return Distribution(std::vector<Rational>(n, Rational(1, n)));
}

Distribution evolve(const MarkovChain& chain, const Distribution& start, std::size_t steps)
{
    if (start.size() != chain.size())
        throw DimensionMismatch("evolve: distribution of length " + std::to_string(start.size()) +
                                " for a chain with " + std::to_string(chain.size()) + " states");
    IntegerKernel kernel(chain);
    auto v = ScaledVector::from(start);
    for (std::size_t t = 0; t < steps; ++t)
        v.advance(kernel);
    return v.to_distribution();
}

Rational tv_distance(const Distribution& mu, const Distribution& nu)
{
    if (mu.size() != nu.size())
        throw DimensionMismatch("tv_distance: distributions of different length");
    Rational sum = 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] >= nu[i])
            sum += mu[i] - nu[i];
    return sum;
}

namespace {

std::vector<ScaledVector> rows_after(const MarkovChain& chain, std::size_t n)
{
    IntegerKernel kernel(chain);
    std::vector<ScaledVector> out;
    out.reserve(chain.size());
    for (State x = 0; x < chain.size(); ++x) {
        auto v = ScaledVector::point(chain.size(), x);
        for (std::size_t t = 0; t < n; ++t)
            v.advance(kernel);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace

Rational d_bar(const MarkovChain& chain, std::size_t n)
{
    auto rows = rows_after(chain, n);
    Rational best = 0;
    for (std::size_t x = 0; x < rows.size(); ++x)
        for (std::size_t y = x + 1; y < rows.size(); ++y)
            best = std::max(best, tv_distance(rows[x], rows[y]));
    return best;
}

Rational d(const MarkovChain& chain, const Distribution& pi, std::size_t n)
{
    if (pi.size() != chain.size())
        throw DimensionMismatch("d: reference distribution has wrong length");
    auto rows = rows_after(chain, n);
    auto target = ScaledVector::from(pi);
    Rational best = 0;
    for (auto& r : rows)
        best = std::max(best, tv_distance(r, target));
    return best;
}

std::size_t mixing_time(const MarkovChain& chain, const Distribution& pi, std::size_t cap)
{
    if (pi.size() != chain.size())
        throw DimensionMismatch("mixing_time: reference distribution has wrong length");
    IntegerKernel kernel(chain);
    auto target = ScaledVector::from(pi);
    std::vector<ScaledVector> rows;
    for (State x = 0; x < chain.size(); ++x)
        rows.push_back(ScaledVector::point(chain.size(), x));
    const Rational quarter(1, 4);
    for (std::size_t n = 0; n <= cap; ++n) {
        Rational worst = 0;
        for (auto& r : rows)
            worst = std::max(worst, tv_distance(r, target));
        if (worst <= quarter)
            return n;
        for (auto& r : rows)
            r.advance(kernel);
    }
    throw BudgetExceeded("mixing_time: d(n) > 1/4 for all n <= " + std::to_string(cap));
}

TimeLayeredChain time_layer(const MarkovChain& chain, std::size_t horizon)
{
    const std::size_t n = chain.size();
    std::vector<std::string> labels;
    labels.reserve(n * (horizon + 1));
    for (std::size_t layer = 0; layer <= horizon; ++layer)
        for (State s = 0; s < n; ++s)
            labels.push_back(chain.label(s) + "@" + std::to_string(layer));

    std::vector<std::vector<Transition>> rows(n * (horizon + 1));
    for (std::size_t layer = 0; layer <= horizon; ++layer) {
        for (State s = 0; s < n; ++s) {
            auto& row = rows[layer * n + s];
            if (layer == horizon) {
                row.push_back({layer * n + s, Rational(1)});
                continue;
            }
            for (auto& t : chain.row(s))
                row.push_back({(layer + 1) * n + t.to, t.p});
        }
    }
    return TimeLayeredChain{chain, horizon, MarkovChain(std::move(labels), std::move(rows))};
}

namespace {

std::vector<std::vector<bool>> reachability(const MarkovChain& chain)
{
    const std::size_t n = chain.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (State s = 0; s < n; ++s) {
        std::vector<State> stack{s};
        reach[s][s] = true;
        while (!stack.empty()) {
            State u = stack.back();
            stack.pop_back();
            for (auto& t : chain.row(u)) {
                if (!reach[s][t.to]) {
                    reach[s][t.to] = true;
                    stack.push_back(t.to);
                }
            }
        }
    }
    return reach;
}

} // namespace

Distribution limit_distribution(const MarkovChain& chain, const Distribution& start)
{
    const std::size_t n = chain.size();
    if (start.size() != n)
        throw DimensionMismatch("limit_distribution: start has wrong length");

    auto reach = reachability(chain);
    std::vector<State> transient;
    std::vector<long> transient_pos(n, -1);
    for (State s = 0; s < n; ++s) {
        bool recurrent = true;
        for (State t = 0; t < n && recurrent; ++t)
            if (reach[s][t] && !reach[t][s])
                recurrent = false;
        if (recurrent) {
            if (!chain.is_absorbing(s))
                throw DomainError("limit_distribution: state \"" + chain.label(s) +
                                  "\" lies in a closed class that is not a single absorbing state");
        } else {
            transient_pos[s] = static_cast<long>(transient.size());
            transient.push_back(s);
        }
    }

    // Expected visits y = start_T (I - Q)^{-1}: solve (I - Q)^T y = start_T.
    const std::size_t m = transient.size();
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1));
    for (std::size_t r = 0; r < m; ++r) {
        a[r][r] = 1;
        a[r][m] = start[transient[r]];
    }
    for (std::size_t c = 0; c < m; ++c)
        for (auto& t : chain.row(transient[c]))
            if (transient_pos[t.to] >= 0)
                a[static_cast<std::size_t>(transient_pos[t.to])][c] -= t.p;

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        while (pivot < m && sgn(a[pivot][col]) == 0)
            ++pivot;
        if (pivot == m)
            throw InvariantViolation("limit_distribution: singular absorption system");
        std::swap(a[pivot], a[col]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || sgn(a[r][col]) == 0)
                continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= m; ++c)
                a[r][c] -= f * a[col][c];
        }
    }

    std::vector<Rational> limit(n);
    for (State s = 0; s < n; ++s)
        if (transient_pos[s] < 0)
            limit[s] = start[s];
    for (std::size_t r = 0; r < m; ++r) {
        Rational visits = a[r][m] / a[r][r];
        if (sgn(visits) == 0)
            continue;
        for (auto& t : chain.row(transient[r]))
            if (transient_pos[t.to] < 0)
                limit[t.to] += visits * t.p;
    }
    return Distribution(std::move(limit));
}

} // namespace segchain
