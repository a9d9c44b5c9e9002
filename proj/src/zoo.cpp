#include "segchain/zoo.hpp"

#include "segchain/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace segchain {

State ZooChain::at(const std::string& role) const
{
    auto it = designated.find(role);
    if (it == designated.end())
        throw DomainError("zoo chain has no designated state \"" + role + "\"");
    return it->second;
}

Designation ZooChain::designation() const
{
    Designation d;
    for (auto& [role, s] : designated)
        d.designated[role] = chain.label(s);
    d.params = params;
    return d;
}

namespace {

void require_open_unit(const Rational& p, const char* what)
{
    if (sgn(p) <= 0 || p >= 1)
        throw DomainError(std::string(what) + " must lie in (0, 1), got " + to_string(p));
}

void require_half_open_unit(const Rational& a, const char* what)
{
    if (sgn(a) <= 0 || a > 1)
        throw DomainError(std::string(what) + " must lie in (0, 1], got " + to_string(a));
}

MarkovChain relabel(const MarkovChain& chain, std::vector<std::string> labels)
{
    std::vector<std::vector<Transition>> rows(chain.size());
    for (State s = 0; s < chain.size(); ++s)
        rows[s].assign(chain.row(s).begin(), chain.row(s).end());
    return MarkovChain(std::move(labels), std::move(rows));
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

ZooChain two_state_chain(const Rational& alpha)
{
    require_half_open_unit(alpha, "alpha");
    auto chain = MarkovChain::from_dense({"0", "1"}, {{1 - alpha, alpha}, {alpha, 1 - alpha}});
    return {std::move(chain), {{"x", 0}, {"y", 1}}, {{"alpha", to_string(alpha)}}};
}

ZooChain haggstrom_chain(const Rational& p)
{
    require_open_unit(p, "p");
    auto layered = time_layer(two_state_chain(p).chain, 2);
    auto chain = relabel(layered.layered, {"x", "y", "0@1", "1@1", "a", "b"});
    return {std::move(chain),
            {{"x", 0}, {"y", 1}, {"a", 4}, {"b", 5}},
            {{"p", to_string(p)}, {"T", "2"}}};
}

NbInstance nb_chain(unsigned m, const Rational& p)
{
    if (m < 1)
        throw DomainError("nb_chain: m must be at least 1");
    require_open_unit(p, "p");

    const State x = 0;
    auto w = [](unsigned j) -> State { return 1 + j; };
    auto v = [m](unsigned j) -> State { return 2 + m + j; };
    auto absorbed = [m](unsigned j) -> State { return 3 + 2 * m + j; };
    const State beyond = 4 + 3 * m;
    const std::size_t n = 5 + 3 * std::size_t{m};

    std::vector<std::string> labels(n);
    labels[x] = "x";
    labels[w(0)] = "y";
    for (unsigned j = 1; j <= m; ++j)
        labels[w(j)] = "w" + std::to_string(j);
    for (unsigned j = 0; j <= m; ++j) {
        labels[v(j)] = "v" + std::to_string(j);
        labels[absorbed(j)] = std::to_string(j);
    }
    labels[beyond] = ">";

    const Rational q = 1 - p;
    std::vector<std::vector<Transition>> rows(n);
    rows[x] = {{v(0), Rational(1)}};
    for (unsigned j = 0; j <= m; ++j) {
        State down_v = j == m ? beyond : v(j + 1);
        State down_w = j == m ? beyond : w(j + 1);
        rows[v(j)] = {{absorbed(j), q}, {down_v, p}};
        rows[w(j)] = {{v(j), q}, {down_w, p}};
        rows[absorbed(j)] = {{absorbed(j), Rational(1)}};
    }
    rows[beyond] = {{beyond, Rational(1)}};
    MarkovChain chain(std::move(labels), std::move(rows));

    // X copies the y-copy's first right move one step late.
    JointKernel k(n);
    auto y_moves = [&](State a, State b) {
        std::vector<JointTransition> row;
        for (auto& t : chain.row(b))
            row.push_back({a, t.to, t.p});
        return row;
    };
    for (State a = 0; a < n; ++a)
        for (State b = 0; b < n; ++b) {
            if (chain.is_absorbing(a)) {
                k.set_row(a, b, y_moves(a, b));
                continue;
            }
            std::vector<JointTransition> row;
            for (auto& ta : chain.row(a))
                for (auto& tb : chain.row(b))
                    row.push_back({ta.to, tb.to, ta.p * tb.p});
            k.set_row(a, b, std::move(row));
        }
    k.set_row(x, w(0), {{v(0), w(1), p}, {v(0), v(0), q}});
    for (unsigned j = 0; j < m; ++j) {
        State y_down = j + 1 == m ? beyond : w(j + 2);
        k.set_row(v(j), w(j + 1), {{v(j + 1), y_down, p}, {v(j + 1), v(j + 1), q}});
    }
    k.set_row(v(m), beyond, {{beyond, beyond, Rational(1)}});
    for (unsigned j = 0; j <= m; ++j)
        k.set_row(v(j), v(j), y_moves(absorbed(j), v(j)));

    std::map<std::string, State> designated{{"x", x}, {"y", w(0)}, {">", beyond}};
    for (unsigned j = 0; j <= m; ++j)
        designated[std::to_string(j)] = absorbed(j);
    ZooChain zoo{chain, std::move(designated), {{"m", std::to_string(m)}, {"p", to_string(p)}}};
    MarkovianCouplingKernel mimicking(std::move(chain), std::move(k));
    return {std::move(zoo), std::move(mimicking)};
}

ZooChain birth_death_chain(std::size_t L, const Rational& alpha)
{
    if (L < 1)
        throw DomainError("birth_death_chain: L must be at least 1");
    require_half_open_unit(alpha, "alpha");
    std::vector<std::string> labels;
    std::vector<std::vector<Transition>> rows(L + 1);
    const Rational half(1, 2);
    for (State s = 0; s <= L; ++s) {
        labels.push_back(std::to_string(s));
        if (s == 0)
            rows[s] = {{0, 1 - alpha}, {1, alpha}};
        else if (s == L)
            rows[s] = {{L - 1, alpha}, {L, 1 - alpha}};
        else
            rows[s] = {{s - 1, half}, {s + 1, half}};
    }
    return {MarkovChain(std::move(labels), std::move(rows)),
            {{"x", 0}, {"y", L}},
            {{"L", std::to_string(L)}, {"alpha", to_string(alpha)}}};
}

TimeLayeredChain LowerBoundInstance::layered() const
{
    return time_layer(base.chain, horizon);
}

LowerBoundInstance lower_bound_chain(std::size_t L, double delta, std::size_t T)
{
    if (L < 1)
        throw DomainError("lower_bound_chain: L must be at least 1");
    if (!(delta > 0))
        throw DomainError("lower_bound_chain: delta must be positive");
    if (T < 1)
        throw DomainError("lower_bound_chain: T must be at least 1");
    const double alpha_float =
        0.5 * (std::numbers::ln2 + delta) * static_cast<double>(L + 1) / static_cast<double>(T);
    if (!(alpha_float < 1))
        throw DomainError("lower_bound_chain: alpha = " + format_double(alpha_float) +
                          " is not below 1; increase T or decrease delta");
    Rational alpha = snap_to_rational(alpha_float, alpha_snap_tolerance);
    auto base = birth_death_chain(L, alpha);
    base.params["delta"] = format_double(delta);
    base.params["T"] = std::to_string(T);
    base.params["alpha_float"] = format_double(alpha_float);
    return {std::move(base), T, delta, alpha_float, std::move(alpha)};
}

} // namespace segchain
