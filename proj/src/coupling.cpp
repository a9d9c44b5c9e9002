#include "segchain/coupling.hpp"

#include "segchain/errors.hpp"
#include "segchain/propagation.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace segchain {

// ---------------------------------------------------------------- kernels

JointKernel::JointKernel(std::size_t states) : n_(states), rows_(states * states) {}

JointKernel JointKernel::independent(const MarkovChain& chain)
{
    JointKernel k(chain.size());
    for (State a = 0; a < chain.size(); ++a) {
        for (State b = 0; b < chain.size(); ++b) {
            std::vector<JointTransition> row;
            for (auto& ta : chain.row(a))
                for (auto& tb : chain.row(b))
                    row.push_back({ta.to, tb.to, ta.p * tb.p});
            k.set_row(a, b, std::move(row));
        }
    }
    return k;
}

void JointKernel::set_row(State x, State y, std::vector<JointTransition> row)
{
    if (x >= n_ || y >= n_)
        throw DimensionMismatch("JointKernel::set_row: pair state out of range");
    rows_[x * n_ + y] = std::move(row);
}

namespace {

void validate_joint(const JointKernel& k, std::size_t n, std::size_t step)
{
    if (k.states() != n)
        throw ParseError("coupling kernel for step " + std::to_string(step) +
                         " has the wrong state count");
    for (State a = 0; a < n; ++a) {
        for (State b = 0; b < n; ++b) {
            Rational sum = 0;
            for (auto& t : k.row(a, b)) {
                if (t.x >= n || t.y >= n)
                    throw ParseError("coupling row refers to a state out of range");
                if (!is_probability(t.p))
                    throw ParseError("coupling row has a probability outside [0,1]");
                sum += t.p;
            }
            if (sum != 1)
                throw ParseError("coupling row (" + std::to_string(a) + "," + std::to_string(b) +
                                 ") at step " + std::to_string(step) + " sums to " +
                                 to_string(sum));
        }
    }
}

} // namespace

MarkovianCouplingKernel::MarkovianCouplingKernel(MarkovChain chain, JointKernel kernel)
    : chain_(std::move(chain)), homogeneous_(true)
{
    validate_joint(kernel, chain_.size(), 0);
    steps_.push_back(std::move(kernel));
}

MarkovianCouplingKernel::MarkovianCouplingKernel(MarkovChain chain,
                                                 std::vector<JointKernel> per_step)
    : chain_(std::move(chain)), steps_(std::move(per_step)), homogeneous_(false)
{
    if (steps_.empty())
        throw ParseError("time-dependent coupling with no steps");
    for (std::size_t t = 0; t < steps_.size(); ++t)
        validate_joint(steps_[t], chain_.size(), t);
}

const JointKernel& MarkovianCouplingKernel::at_step(std::size_t t) const
{
    if (homogeneous_)
        return steps_.front();
    if (t >= steps_.size())
        throw DimensionMismatch("coupling defines " + std::to_string(steps_.size()) +
                                " steps, step " + std::to_string(t) + " requested");
    return steps_[t];
}

std::optional<std::size_t> MarkovianCouplingKernel::max_horizon() const
{
    if (homogeneous_)
        return std::nullopt;
    return steps_.size();
}

// ------------------------------------------------------------- trajectories

Rational path_probability(const MarkovChain& chain, std::span<const State> path)
{
    Rational p = 1;
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
        p *= chain(path[t], path[t + 1]);
        if (sgn(p) == 0)
            break;
    }
    return p;
}

namespace {

std::string path_string(const MarkovChain& chain, const Path& path)
{
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i)
            s += ' ';
        s += chain.label(path[i]);
    }
    return s;
}

MarginalReport compare_path_law(const MarkovChain& chain, const std::map<Path, Rational>& law,
                                char coordinate)
{
    for (auto& [path, mass] : law) {
        Rational expected = path_probability(chain, path);
        if (mass != expected) {
            std::ostringstream os;
            os << coordinate << "-trajectory [" << path_string(chain, path) << "] has mass "
               << to_string(mass) << " under the coupling but probability " << to_string(expected)
               << " under the chain";
            return {false, os.str()};
        }
    }
    return {};
}

} // namespace

MarginalReport check_marginals(const MarkovianCouplingKernel& kernel, State x, State y,
                               std::size_t horizon)
{
    const auto& chain = kernel.chain();
    if (x >= chain.size() || y >= chain.size())
        throw DimensionMismatch("check_marginals: start state out of range");

    // X side: propagate (X history, current Y); Y side: (current X, Y history).
    std::map<std::pair<Path, State>, Rational> xs{{{Path{x}, y}, Rational(1)}};
    std::map<std::pair<State, Path>, Rational> ys{{{x, Path{y}}, Rational(1)}};
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& k = kernel.at_step(t);
        std::map<std::pair<Path, State>, Rational> nx;
        for (auto& [key, mass] : xs) {
            for (auto& jt : k.row(key.first.back(), key.second)) {
                if (sgn(jt.p) == 0)
                    continue;
                Path p = key.first;
                p.push_back(jt.x);
                nx[{std::move(p), jt.y}] += mass * jt.p;
            }
        }
        xs = std::move(nx);
        std::map<std::pair<State, Path>, Rational> ny;
        for (auto& [key, mass] : ys) {
            for (auto& jt : k.row(key.first, key.second.back())) {
                if (sgn(jt.p) == 0)
                    continue;
                Path p = key.second;
                p.push_back(jt.y);
                ny[{jt.x, std::move(p)}] += mass * jt.p;
            }
        }
        ys = std::move(ny);
    }

    std::map<Path, Rational> xlaw, ylaw;
    for (auto& [key, mass] : xs)
        xlaw[key.first] += mass;
    for (auto& [key, mass] : ys)
        ylaw[key.second] += mass;
    auto rx = compare_path_law(chain, xlaw, 'X');
    if (!rx.correct)
        return rx;
    return compare_path_law(chain, ylaw, 'Y');
}

MarginalReport check_marginals(const MarkovChain& chain, State x, State y, std::size_t horizon,
                               const TrajectoryCoupling::Masses& masses)
{
    Rational total = 0;
    std::map<Path, Rational> xlaw, ylaw;
    for (auto& [key, mass] : masses) {
        const auto& [xp, yp] = key;
        if (xp.size() != horizon + 1 || yp.size() != horizon + 1)
            return {false, "trajectory of the wrong length"};
        if (xp.front() != x || yp.front() != y)
            return {false, "trajectory does not begin at the coupling's start states"};
        if (sgn(mass) < 0)
            return {false, "negative mass"};
        total += mass;
        xlaw[xp] += mass;
        ylaw[yp] += mass;
    }
    if (total != 1)
        return {false, "total mass " + to_string(total) + " != 1"};
    auto rx = compare_path_law(chain, xlaw, 'X');
    if (!rx.correct)
        return rx;
    return compare_path_law(chain, ylaw, 'Y');
}

MarginalReport check_aggregate_marginals(const MarkovianCouplingKernel& kernel, State x, State y,
                                         std::size_t horizon)
{
    const auto& chain = kernel.chain();
    const std::size_t n = chain.size();
    std::vector<Rational> mu(n * n);
    mu[x * n + y] = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& k = kernel.at_step(t);
        // lhs_x[a][a'] = sum_b mu(a,b) K((a,b) -> X'=a'); same for Y.
        std::vector<Rational> lhs_x(n * n), lhs_y(n * n), mx(n), my(n);
        std::vector<Rational> next(n * n);
        for (State a = 0; a < n; ++a) {
            for (State b = 0; b < n; ++b) {
                const Rational& m = mu[a * n + b];
                if (sgn(m) == 0)
                    continue;
                mx[a] += m;
                my[b] += m;
                for (auto& jt : k.row(a, b)) {
                    Rational w = m * jt.p;
                    lhs_x[a * n + jt.x] += w;
                    lhs_y[b * n + jt.y] += w;
                    next[jt.x * n + jt.y] += w;
                }
            }
        }
        for (State a = 0; a < n; ++a) {
            for (State b = 0; b < n; ++b) {
                if (lhs_x[a * n + b] != chain(a, b) * mx[a]) {
                    return {false, "step " + std::to_string(t) + ": X-aggregate from \"" +
                                       chain.label(a) + "\" to \"" + chain.label(b) +
                                       "\" differs from the kernel"};
                }
                if (lhs_y[a * n + b] != chain(a, b) * my[a]) {
                    return {false, "step " + std::to_string(t) + ": Y-aggregate from \"" +
                                       chain.label(a) + "\" to \"" + chain.label(b) +
                                       "\" differs from the kernel"};
                }
            }
        }
        mu = std::move(next);
    }
    return {};
}

TrajectoryCoupling::TrajectoryCoupling(MarkovChain chain, State x, State y, std::size_t horizon,
                                       Masses masses)
    : chain_(std::move(chain)), x_(x), y_(y), horizon_(horizon), masses_(std::move(masses))
{
    auto report = check_marginals(chain_, x_, y_, horizon_, masses_);
    if (!report.correct)
        throw InvariantViolation("trajectory coupling is not marginal-correct: " + report.witness);
}

// -------------------------------------------------------------- faithfulness

namespace {

std::optional<FaithfulnessWitness> inspect_row(const MarkovChain& chain, const JointKernel& k,
                                               std::size_t step, State a, State b)
{
    const std::size_t n = chain.size();
    std::vector<Rational> px(n), py(n);
    for (auto& jt : k.row(a, b)) {
        px[jt.x] += jt.p;
        py[jt.y] += jt.p;
    }
    for (State s = 0; s < n; ++s) {
        Rational base = chain(a, s);
        if (px[s] != base)
            return FaithfulnessWitness{step, {a, b}, 'X', s, px[s], base};
    }
    for (State s = 0; s < n; ++s) {
        Rational base = chain(b, s);
        if (py[s] != base)
            return FaithfulnessWitness{step, {a, b}, 'Y', s, py[s], base};
    }
    return std::nullopt;
}

} // namespace

FaithfulnessResult check_faithful(const MarkovianCouplingKernel& kernel,
                                  std::optional<PairState> start, std::size_t horizon)
{
    const auto& chain = kernel.chain();
    const std::size_t n = chain.size();

    if (!start) {
        for (std::size_t t = 0; t < kernel.steps().size(); ++t)
            for (State a = 0; a < n; ++a)
                for (State b = 0; b < n; ++b)
                    if (auto w = inspect_row(chain, kernel.steps()[t], t, a, b))
                        return {false, w};
        return {};
    }

    if (kernel.time_homogeneous() && horizon == 0) {
        // Closure of pair states reachable from start.
        std::set<PairState> seen{*start};
        std::vector<PairState> stack{*start};
        while (!stack.empty()) {
            PairState ps = stack.back();
            stack.pop_back();
            for (auto& jt : kernel.at_step(0).row(ps.x, ps.y)) {
                PairState next{jt.x, jt.y};
                if (sgn(jt.p) > 0 && seen.insert(next).second)
                    stack.push_back(next);
            }
        }
        for (auto& ps : seen)
            if (auto w = inspect_row(chain, kernel.at_step(0), 0, ps.x, ps.y))
                return {false, w};
        return {};
    }

    std::size_t steps = horizon;
    if (steps == 0)
        steps = *kernel.max_horizon();
    std::set<PairState> layer{*start};
    for (std::size_t t = 0; t < steps; ++t) {
        const auto& k = kernel.at_step(t);
        std::set<PairState> next;
        for (auto& ps : layer) {
            if (auto w = inspect_row(chain, k, t, ps.x, ps.y))
                return {false, w};
            for (auto& jt : k.row(ps.x, ps.y))
                if (sgn(jt.p) > 0)
                    next.insert({jt.x, jt.y});
        }
        layer = std::move(next);
    }
    return {};
}

std::string describe(const FaithfulnessWitness& w, const MarkovChain& chain)
{
    std::ostringstream os;
    os << "step " << w.step << ", pair (" << chain.label(w.from.x) << ", "
       << chain.label(w.from.y) << "): P(" << w.coordinate << "' = " << chain.label(w.successor)
       << ") is " << to_string(w.coupled) << " under the coupling but "
       << to_string(w.base) << " under the chain";
    return os.str();
}

MarkovianCouplingKernel make_sticky(const MarkovianCouplingKernel& kernel,
                                    std::optional<PairState> start, std::size_t horizon)
{
    auto verdict = check_faithful(kernel, start, horizon);
    if (!verdict.faithful)
        throw DomainError("make_sticky: coupling is not faithful (" +
                          describe(*verdict.witness, kernel.chain()) + ")");
    const auto& chain = kernel.chain();
    std::vector<JointKernel> steps = kernel.steps();
    for (auto& k : steps) {
        for (State s = 0; s < chain.size(); ++s) {
            std::vector<JointTransition> row;
            for (auto& t : chain.row(s))
                row.push_back({t.to, t.to, t.p});
            k.set_row(s, s, std::move(row));
        }
    }
    if (kernel.time_homogeneous())
        return MarkovianCouplingKernel(chain, std::move(steps.front()));
    return MarkovianCouplingKernel(chain, std::move(steps));
}

// ----------------------------------------------------------- meeting times

MeetingTimeDistribution meeting_time_distribution(const MarkovianCouplingKernel& kernel, State x,
                                                  State y, std::size_t horizon)
{
    const std::size_t n = kernel.chain().size();
    if (x >= n || y >= n)
        throw DimensionMismatch("meeting_time_distribution: start state out of range");
    // Index (a*n + b)*2 + met.
    std::vector<Rational> mass(2 * n * n);
    mass[(x * n + y) * 2 + (x == y ? 1 : 0)] = 1;
    MeetingTimeDistribution out;
    auto met_mass = [&] {
        Rational m = 0;
        for (std::size_t i = 1; i < mass.size(); i += 2)
            m += mass[i];
        return m;
    };
    out.cdf.push_back(met_mass());
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& k = kernel.at_step(t);
        std::vector<Rational> next(mass.size());
        for (State a = 0; a < n; ++a) {
            for (State b = 0; b < n; ++b) {
                for (int met = 0; met < 2; ++met) {
                    const Rational& m = mass[(a * n + b) * 2 + met];
                    if (sgn(m) == 0)
                        continue;
                    for (auto& jt : k.row(a, b)) {
                        int now = (met || jt.x == jt.y) ? 1 : 0;
                        next[(jt.x * n + jt.y) * 2 + now] += m * jt.p;
                    }
                }
            }
        }
        mass = std::move(next);
        out.cdf.push_back(met_mass());
    }
    return out;
}

MeetingTimeDistribution meeting_time_distribution(const TrajectoryCoupling& coupling,
                                                  std::size_t horizon)
{
    if (horizon > coupling.horizon())
        throw DimensionMismatch("meeting_time_distribution: horizon " + std::to_string(horizon) +
                                " exceeds the coupling's " + std::to_string(coupling.horizon()));
    MeetingTimeDistribution out;
    out.cdf.assign(horizon + 1, Rational(0));
    for (auto& [key, mass] : coupling.masses()) {
        const auto& [xp, yp] = key;
        for (std::size_t t = 0; t <= horizon; ++t) {
            if (xp[t] == yp[t]) {
                for (std::size_t u = t; u <= horizon; ++u)
                    out.cdf[u] += mass;
                break;
            }
        }
    }
    return out;
}

Rational separation_after_meeting(const MarkovianCouplingKernel& kernel, State x, State y,
                                  std::size_t horizon)
{
    const std::size_t n = kernel.chain().size();
    // Phase 0: not yet met; 1: met and together since; 2: met, then apart.
    std::vector<Rational> mass(3 * n * n);
    mass[(x * n + y) * 3 + (x == y ? 1 : 0)] = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& k = kernel.at_step(t);
        std::vector<Rational> next(mass.size());
        for (State a = 0; a < n; ++a)
            for (State b = 0; b < n; ++b)
                for (int phase = 0; phase < 3; ++phase) {
                    const Rational& m = mass[(a * n + b) * 3 + phase];
                    if (sgn(m) == 0)
                        continue;
                    for (auto& jt : k.row(a, b)) {
                        bool same = jt.x == jt.y;
                        int now = phase == 0 ? (same ? 1 : 0) : phase == 1 ? (same ? 1 : 2) : 2;
                        next[(jt.x * n + jt.y) * 3 + now] += m * jt.p;
                    }
                }
        mass = std::move(next);
    }
    Rational apart = 0;
    for (std::size_t i = 2; i < mass.size(); i += 3)
        apart += mass[i];
    return apart;
}

TrajectoryCoupling to_trajectory_coupling(const MarkovianCouplingKernel& kernel, State x, State y,
                                          std::size_t horizon)
{
    TrajectoryCoupling::Masses masses;
    Path xp{x}, yp{y};
    auto recurse = [&](auto&& self, const Rational& mass) -> void {
        std::size_t t = xp.size() - 1;
        if (t == horizon) {
            masses[{xp, yp}] += mass;
            return;
        }
        for (auto& jt : kernel.at_step(t).row(xp.back(), yp.back())) {
            if (sgn(jt.p) == 0)
                continue;
            xp.push_back(jt.x);
            yp.push_back(jt.y);
            self(self, mass * jt.p);
            xp.pop_back();
            yp.pop_back();
        }
    };
    recurse(recurse, Rational(1));
    return TrajectoryCoupling(kernel.chain(), x, y, horizon, std::move(masses));
}

// ------------------------------------------------------------ bound checks

namespace {

Rational tv_after(const MarkovChain& chain, State x, State y, std::size_t n)
{
    IntegerKernel k(chain);
    auto a = ScaledVector::point(chain.size(), x);
    auto b = ScaledVector::point(chain.size(), y);
    for (std::size_t t = 0; t < n; ++t) {
        a.advance(k);
        b.advance(k);
    }
    return tv_distance(a, b);
}

} // namespace

BoundReport coupling_inequality_check(const MarkovChain& chain, State x, State y,
                                      const MeetingTimeDistribution& mtd, std::size_t n)
{
    if (n > mtd.horizon())
        throw DimensionMismatch("coupling_inequality_check: n beyond the meeting-time horizon");
    Rational tv = tv_after(chain, x, y, n);
    Rational bound = 1 - mtd.cdf[n];
    return {tv, bound, tv <= bound};
}

BoundReport segregation_bound_check(const MarkovChain& chain, State x, State y,
                                    const MeetingTimeDistribution& mtd, std::size_t n)
{
    if (n > mtd.horizon())
        throw DimensionMismatch("segregation_bound_check: n beyond the meeting-time horizon");
    Rational tv = tv_after(chain, x, y, n);
    Rational bound = 1 - mtd.cdf[n] / 2;
    return {tv, bound, tv <= bound};
}

std::uint64_t tmix_upper_bound(std::uint64_t n, const Rational& alpha)
{
    if (sgn(alpha) <= 0 || alpha > 1)
        throw DomainError("tmix_upper_bound: alpha must lie in (0, 1]");
    const Rational q = 1 - alpha / 2;
    const Rational quarter(1, 4);
    const long double ratio =
        std::log(0.25L) / std::log1p(-static_cast<long double>(to_double(alpha)) / 2);
    std::uint64_t k = static_cast<std::uint64_t>(std::ceil(ratio));
    if (k == 0)
        k = 1;
    const long double nearest = std::round(ratio);
    if (std::fabs(ratio - nearest) < 1e-6L * std::max(1.0L, ratio)) {
        if (k > 100000)
            throw DomainError("tmix_upper_bound: cannot certify the ceiling for this alpha");
        // least k with q^k <= 1/4, checked exactly around the estimate
        while (k > 1 && power(q, k - 1) <= quarter)
            --k;
        while (power(q, k) > quarter)
            ++k;
    }
    return n * k;
}

} // namespace segchain
