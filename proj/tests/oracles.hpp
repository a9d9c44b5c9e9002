#pragma once

// Reference computations used only by the tests. They share no code with
// the library beyond the chain container and are deliberately naive.

#include "segchain/chain.hpp"

#include <functional>
#include <queue>
#include <random>
#include <vector>

namespace oracle {

using segchain::MarkovChain;
using segchain::Rational;
using segchain::State;

using Dense = std::vector<std::vector<Rational>>;

inline Dense dense(const MarkovChain& c)
{
    Dense m(c.size(), std::vector<Rational>(c.size()));
    for (State i = 0; i < c.size(); ++i)
        for (State j = 0; j < c.size(); ++j)
            m[i][j] = c(i, j);
    return m;
}

inline Dense multiply(const Dense& a, const Dense& b)
{
    const std::size_t n = a.size();
    Dense c(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (sgn(a[i][k]) != 0)
                for (std::size_t j = 0; j < n; ++j)
                    c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Dense identity(std::size_t n)
{
    Dense m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

inline Dense power(const Dense& a, std::size_t k)
{
    Dense r = identity(a.size());
    for (std::size_t i = 0; i < k; ++i)
        r = multiply(r, a);
    return r;
}

// Square matrix restricted to the index set `keep` (others zeroed).
inline Dense restrict_block(Dense m, const std::vector<bool>& keep)
{
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (!keep[i] || !keep[j])
                m[i][j] = 0;
    return m;
}

inline Rational tv(const std::vector<Rational>& a, const std::vector<Rational>& b)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational d = a[i] - b[i];
        s += d < 0 ? Rational(-d) : d;
    }
    return s / 2;
}

struct WeightedPath {
    std::vector<State> states;
    Rational p;
};

inline std::vector<WeightedPath> paths(const MarkovChain& c, State start, std::size_t T)
{
    std::vector<WeightedPath> out{{{start}, Rational(1)}};
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<WeightedPath> next;
        for (auto& wp : out)
            for (State j = 0; j < c.size(); ++j) {
                Rational q = c(wp.states.back(), j);
                if (sgn(q) == 0)
                    continue;
                auto s = wp.states;
                s.push_back(j);
                next.push_back({std::move(s), wp.p * q});
            }
        out = std::move(next);
    }
    return out;
}

// Separation of a mask sequence by explicit path enumeration.
inline Rational separation(const MarkovChain& c, State x, State y,
                           const std::vector<std::uint64_t>& masks)
{
    const std::size_t T = masks.size() - 1;
    Rational s = 0;
    for (auto& wp : paths(c, x, T)) {
        bool inside = true;
        for (std::size_t t = 0; t <= T; ++t)
            inside = inside && ((masks[t] >> wp.states[t]) & 1u);
        if (inside)
            s += wp.p;
    }
    for (auto& wp : paths(c, y, T)) {
        bool outside = true;
        for (std::size_t t = 0; t <= T; ++t)
            outside = outside && !((masks[t] >> wp.states[t]) & 1u);
        if (outside)
            s += wp.p;
    }
    return s;
}

// Max over all (2^n)^(T+1) mask sequences, by explicit enumeration.
inline Rational optimal_separation(const MarkovChain& c, State x, State y, std::size_t T)
{
    const std::uint64_t per = std::uint64_t{1} << c.size();
    std::vector<std::uint64_t> masks(T + 1, 0);
    Rational best = 0;
    for (;;) {
        Rational v = separation(c, x, y, masks);
        if (v > best)
            best = v;
        std::size_t t = 0;
        while (t <= T && ++masks[t] == per)
            masks[t++] = 0;
        if (t > T)
            break;
    }
    return best;
}

// Edmonds-Karp on a dense capacity matrix.
inline Rational max_flow(Dense cap, std::size_t s, std::size_t t)
{
    const std::size_t n = cap.size();
    Rational total = 0;
    for (;;) {
        std::vector<long> parent(n, -1);
        parent[s] = static_cast<long>(s);
        std::queue<std::size_t> q;
        q.push(s);
        while (!q.empty() && parent[t] < 0) {
            auto u = q.front();
            q.pop();
            for (std::size_t v = 0; v < n; ++v)
                if (parent[v] < 0 && sgn(cap[u][v]) > 0) {
                    parent[v] = static_cast<long>(u);
                    q.push(v);
                }
        }
        if (parent[t] < 0)
            return total;
        Rational push = -1;
        for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) {
            auto u = static_cast<std::size_t>(parent[v]);
            if (push < 0 || cap[u][v] < push)
                push = cap[u][v];
        }
        for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) {
            auto u = static_cast<std::size_t>(parent[v]);
            cap[u][v] -= push;
            cap[v][u] += push;
        }
        total += push;
    }
}

// Optimal meeting probability from the trajectory network, dense form.
inline Rational meeting(const MarkovChain& c, State x, State y, std::size_t T)
{
    auto xs = paths(c, x, T);
    auto ys = paths(c, y, T);
    const std::size_t n = 2 + xs.size() + ys.size();
    Dense cap(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < xs.size(); ++i)
        cap[0][2 + i] = xs[i].p;
    for (std::size_t j = 0; j < ys.size(); ++j)
        cap[2 + xs.size() + j][1] = ys[j].p;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            for (std::size_t t = 0; t <= T; ++t)
                if (xs[i].states[t] == ys[j].states[t]) {
                    cap[2 + i][2 + xs.size() + j] = 1;
                    break;
                }
    return max_flow(std::move(cap), 0, 1);
}

inline MarkovChain random_chain(std::mt19937& rng, std::size_t n, int bound = 5)
{
    std::uniform_int_distribution<int> draw(0, bound);
    std::vector<std::string> labels;
    Dense m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("s" + std::to_string(i));
        std::vector<int> w(n);
        int sum = 0;
        while (sum == 0) {
            sum = 0;
            for (auto& v : w)
                sum += (v = draw(rng));
        }
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = Rational(w[j], sum);
        for (auto& v : m[i])
            v.canonicalize();
    }
    return MarkovChain::from_dense(labels, m);
}

// NB(1,p) and NB(2,p) tails beyond K: P(k > K).
inline Rational tail_nb1(const Rational& p, std::size_t K)
{
    Rational r = 1;
    for (std::size_t i = 0; i <= K; ++i)
        r *= p;
    return r;
}

inline Rational tail_nb2(const Rational& p, std::size_t K)
{
    return tail_nb1(p, K) * (1 + Rational(static_cast<long>(K + 1)) * (1 - p));
}

} // namespace oracle
