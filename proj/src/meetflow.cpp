#include "segchain/meetflow.hpp"

#include "segchain/errors.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace segchain {

TrajectorySet enumerate_trajectories(const MarkovChain& chain, State start, std::size_t horizon,
                                     std::size_t cap)
{
    if (start >= chain.size())
        throw DimensionMismatch("enumerate_trajectories: start state out of range");
    // Count first so oversized instances fail before any path is stored.
    std::vector<std::size_t> count(chain.size(), 0), next(chain.size());
    count[start] = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        std::fill(next.begin(), next.end(), 0);
        for (State s = 0; s < chain.size(); ++s)
            if (count[s])
                for (auto& tr : chain.row(s))
                    next[tr.to] = std::min(next[tr.to] + count[s], cap + 1);
        count.swap(next);
    }
    std::size_t total = 0;
    for (auto c : count)
        total = std::min(total + c, cap + 1);
    if (total > cap)
        throw BudgetExceeded("more than " + std::to_string(cap) +
                             " trajectories; instance too large for the flow formulation");

    TrajectorySet out{start, horizon, {}};
    out.paths.reserve(total);
    Path path{start};
    auto dfs = [&](auto&& self, const Rational& prob) -> void {
        if (path.size() == horizon + 1) {
            out.paths.push_back({path, prob});
            return;
        }
        for (auto& t : chain.row(path.back())) {
            path.push_back(t.to);
            self(self, prob * t.p);
            path.pop_back();
        }
    };
    dfs(dfs, Rational(1));
    return out;
}

FlowNetwork::FlowNetwork(TrajectorySet xs, TrajectorySet ys, std::vector<MiddleArc> middle)
    : xs_(std::move(xs)), ys_(std::move(ys)), middle_(std::move(middle))
{
    if (xs_.horizon != ys_.horizon)
        throw DimensionMismatch("flow network: trajectory sets have different horizons");
    if (xs_.paths.size() + ys_.paths.size() + 2 > std::numeric_limits<std::uint32_t>::max())
        throw BudgetExceeded("flow network: too many trajectories");
}

bool paths_intersect(const Path& a, const Path& b)
{
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t t = 0; t < n; ++t)
        if (a[t] == b[t])
            return true;
    return false;
}

FlowNetwork build_flow_network(TrajectorySet xs, TrajectorySet ys, Execution exec)
{
    if (xs.horizon != ys.horizon)
        throw DimensionMismatch("build_flow_network: horizons " + std::to_string(xs.horizon) +
                                " and " + std::to_string(ys.horizon) + " differ");
    const std::size_t len = xs.horizon + 1;

    // y-paths indexed by (t, state) so each x-path only visits candidates.
    State max_state = 0;
    for (auto* set : {&xs, &ys})
        for (auto& tr : set->paths)
            for (State s : tr.states)
                max_state = std::max(max_state, s);
    const std::size_t width = max_state + 1;
    std::vector<std::vector<std::uint32_t>> by_slot(len * width);
    for (std::uint32_t j = 0; j < ys.paths.size(); ++j)
        for (std::size_t t = 0; t < len; ++t)
            by_slot[t * width + ys.paths[j].states[t]].push_back(j);

    const long nx = static_cast<long>(xs.paths.size());
    std::vector<std::vector<std::uint32_t>> partners(xs.paths.size());
    auto scan = [&](long i, std::vector<char>& seen) {
        auto& out = partners[static_cast<std::size_t>(i)];
        const auto& path = xs.paths[static_cast<std::size_t>(i)].states;
        for (std::size_t t = 0; t < len; ++t)
            for (auto j : by_slot[t * width + path[t]])
                if (!seen[j]) {
                    seen[j] = 1;
                    out.push_back(j);
                }
        for (auto j : out)
            seen[j] = 0;
        std::sort(out.begin(), out.end());
    };

    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<char> seen(ys.paths.size(), 0);
#pragma omp for schedule(static)
            for (long i = 0; i < nx; ++i)
                scan(i, seen);
        }
    } else {
        std::vector<char> seen(ys.paths.size(), 0);
        for (long i = 0; i < nx; ++i)
            scan(i, seen);
    }

    std::vector<FlowNetwork::MiddleArc> middle;
    for (std::uint32_t i = 0; i < partners.size(); ++i)
        for (auto j : partners[i])
            middle.push_back({i, j});
    return FlowNetwork(std::move(xs), std::move(ys), std::move(middle));
}

// ------------------------------------------------------------------ Dinic

namespace {

class Dinic {
public:
    explicit Dinic(std::size_t nodes) : graph_(nodes), level_(nodes), next_(nodes) {}

    // Returns the position of the forward edge in graph_[u].
    std::size_t add_edge(std::size_t u, std::size_t v, const Rational& cap)
    {
        graph_[u].push_back({static_cast<std::uint32_t>(v),
                             static_cast<std::uint32_t>(graph_[v].size()), cap});
        graph_[v].push_back({static_cast<std::uint32_t>(u),
                             static_cast<std::uint32_t>(graph_[u].size() - 1), Rational(0)});
        return graph_[u].size() - 1;
    }

    Rational run(std::size_t s, std::size_t t)
    {
        Rational total = 0;
        while (build_levels(s, t)) {
            std::fill(next_.begin(), next_.end(), 0);
            for (;;) {
                Rational pushed = augment(s, t, nullptr);
                if (sgn(pushed) == 0)
                    break;
                total += pushed;
            }
        }
        return total;
    }

    const Rational& residual(std::size_t u, std::size_t pos) const { return graph_[u][pos].cap; }

private:
    struct Edge {
        std::uint32_t to;
        std::uint32_t rev;
        Rational cap;
    };

    bool build_levels(std::size_t s, std::size_t t)
    {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<std::size_t> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto& e : graph_[u])
                if (sgn(e.cap) > 0 && level_[e.to] < 0) {
                    level_[e.to] = level_[u] + 1;
                    q.push(e.to);
                }
        }
        return level_[t] >= 0;
    }

    // One augmenting path in the level graph; `limit == nullptr` is unbounded.
    Rational augment(std::size_t u, std::size_t t, const Rational* limit)
    {
        if (u == t)
            return limit ? *limit : Rational(0);
        for (; next_[u] < graph_[u].size(); ++next_[u]) {
            Edge& e = graph_[u][next_[u]];
            if (sgn(e.cap) <= 0 || level_[e.to] != level_[u] + 1)
                continue;
            const Rational& bound = (limit && *limit < e.cap) ? *limit : e.cap;
            Rational pushed = augment(e.to, t, &bound);
            if (sgn(pushed) > 0) {
                e.cap -= pushed;
                graph_[e.to][e.rev].cap += pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::vector<std::vector<Edge>> graph_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
};

} // namespace

MaxFlow max_flow(const FlowNetwork& net)
{
    Dinic dinic(net.node_count());
    const auto& xs = net.xs().paths;
    const auto& ys = net.ys().paths;
    for (std::size_t i = 0; i < xs.size(); ++i)
        dinic.add_edge(FlowNetwork::source, net.x_node(i), xs[i].probability);
    std::vector<std::size_t> middle_pos;
    middle_pos.reserve(net.middle().size());
    for (auto& arc : net.middle())
        middle_pos.push_back(dinic.add_edge(net.x_node(arc.x), net.y_node(arc.y), Rational(1)));
    for (std::size_t j = 0; j < ys.size(); ++j)
        dinic.add_edge(net.y_node(j), FlowNetwork::sink, ys[j].probability);

    MaxFlow out;
    out.value = dinic.run(FlowNetwork::source, FlowNetwork::sink);
    out.middle_flow.reserve(net.middle().size());
    for (std::size_t k = 0; k < net.middle().size(); ++k)
        out.middle_flow.push_back(1 - dinic.residual(net.x_node(net.middle()[k].x), middle_pos[k]));
    return out;
}

// ------------------------------------------------------------ extraction

CouplingPlan::CouplingPlan(const FlowNetwork& net, const MaxFlow& flow)
    : xs_(net.xs()), ys_(net.ys()), total_flow_(flow.value), intersecting_(net.middle())
{
    if (flow.middle_flow.size() != net.middle().size())
        throw DimensionMismatch("extract_coupling: flow does not match the network");
    residual_x_.reserve(xs_.paths.size());
    for (auto& tr : xs_.paths)
        residual_x_.push_back(tr.probability);
    residual_y_.reserve(ys_.paths.size());
    for (auto& tr : ys_.paths)
        residual_y_.push_back(tr.probability);

    Rational total = 0;
    for (std::size_t k = 0; k < net.middle().size(); ++k) {
        const Rational& q = flow.middle_flow[k];
        if (sgn(q) < 0)
            throw InvariantViolation("extract_coupling: negative flow on a middle arc");
        if (sgn(q) == 0)
            continue;
        auto [i, j] = net.middle()[k];
        paired_.emplace(std::make_pair(i, j), q);
        residual_x_[i] -= q;
        residual_y_[j] -= q;
        total += q;
    }
    if (total != total_flow_)
        throw InvariantViolation("extract_coupling: middle flow sums to " + to_string(total) +
                                 ", expected " + to_string(total_flow_));
    for (auto* side : {&residual_x_, &residual_y_})
        for (auto& r : *side)
            if (sgn(r) < 0)
                throw InvariantViolation("extract_coupling: flow exceeds a path probability");
}

Rational CouplingPlan::joint_mass(std::uint32_t i, std::uint32_t j) const
{
    Rational m = 0;
    if (auto it = paired_.find({i, j}); it != paired_.end())
        m = it->second;
    if (total_flow_ < 1)
        m += residual_x_[i] * residual_y_[j] / (1 - total_flow_);
    return m;
}

Rational CouplingPlan::meeting_probability() const
{
    Rational total = 0;
    for (auto& arc : intersecting_)
        total += joint_mass(arc.x, arc.y);
    return total;
}

TrajectoryCoupling CouplingPlan::to_trajectory_coupling(const MarkovChain& chain) const
{
    TrajectoryCoupling::Masses masses;
    for (auto& [key, q] : paired_)
        masses[{xs_.paths[key.first].states, ys_.paths[key.second].states}] += q;
    if (total_flow_ < 1) {
        const Rational scale = 1 / (1 - total_flow_);
        for (std::size_t i = 0; i < xs_.paths.size(); ++i) {
            if (sgn(residual_x_[i]) == 0)
                continue;
            Rational ri = residual_x_[i] * scale;
            for (std::size_t j = 0; j < ys_.paths.size(); ++j)
                if (sgn(residual_y_[j]) != 0)
                    masses[{xs_.paths[i].states, ys_.paths[j].states}] += ri * residual_y_[j];
        }
    }
    return TrajectoryCoupling(chain, xs_.start, ys_.start, xs_.horizon, std::move(masses));
}

CouplingPlan extract_coupling(const FlowNetwork& net, const MaxFlow& flow)
{
    return CouplingPlan(net, flow);
}

Rational optimal_meeting_probability(const MarkovChain& chain, State x, State y,
                                     std::size_t horizon, std::size_t cap, Execution exec)
{
    auto net = build_flow_network(enumerate_trajectories(chain, x, horizon, cap),
                                  enumerate_trajectories(chain, y, horizon, cap), exec);
    return max_flow(net).value;
}

DualityReport verify_duality(const MarkovChain& chain, State x, State y, std::size_t horizon,
                             const DualityOptions& options)
{
    auto net = build_flow_network(enumerate_trajectories(chain, x, horizon, options.trajectory_cap),
                                  enumerate_trajectories(chain, y, horizon, options.trajectory_cap),
                                  options.execution);
    auto flow = max_flow(net);
    auto plan = extract_coupling(net, flow);
    auto coupling = plan.to_trajectory_coupling(chain);
    Rational meeting = meeting_time_distribution(coupling, horizon).cdf.back();

    BruteForceOptions bf;
    bf.leaf_budget = options.leaf_budget;
    bf.execution = options.execution;
    auto best = brute_force_optimal_separation(chain, x, y, horizon, bf);
    if (!best)
        throw InvariantViolation("verify_duality: brute force found no sequence");

    bool holds = flow.value == 2 - best->report.value && meeting == flow.value &&
                 plan.meeting_probability() == meeting;
    return DualityReport{flow.value, best->report.value, meeting, best->sequence, holds};
}

std::string path_to_string(const Path& path, const MarkovChain& chain)
{
    std::string s;
    for (std::size_t t = 0; t < path.size(); ++t) {
        if (t)
            s += '|';
        s += chain.label(path[t]);
    }
    return s;
}

nlohmann::json network_to_json(const FlowNetwork& net, const MarkovChain& chain,
                               const MaxFlow* flow)
{
    using nlohmann::json;
    json nodes = json::array({{{"id", 0}, {"kind", "source"}}, {{"id", 1}, {"kind", "sink"}}});
    json arcs = json::array();
    for (std::size_t i = 0; i < net.xs().paths.size(); ++i) {
        const auto& tr = net.xs().paths[i];
        nodes.push_back({{"id", net.x_node(i)}, {"kind", "x"}, {"path", path_to_string(tr.states, chain)}});
        arcs.push_back({{"from", 0}, {"to", net.x_node(i)}, {"capacity", to_string(tr.probability)}});
    }
    for (std::size_t j = 0; j < net.ys().paths.size(); ++j) {
        const auto& tr = net.ys().paths[j];
        nodes.push_back({{"id", net.y_node(j)}, {"kind", "y"}, {"path", path_to_string(tr.states, chain)}});
        arcs.push_back({{"from", net.y_node(j)}, {"to", 1}, {"capacity", to_string(tr.probability)}});
    }
    for (std::size_t k = 0; k < net.middle().size(); ++k) {
        auto& arc = net.middle()[k];
        json a = {{"from", net.x_node(arc.x)}, {"to", net.y_node(arc.y)}, {"capacity", "1"}};
        if (flow)
            a["flow"] = to_string(flow->middle_flow[k]);
        arcs.push_back(std::move(a));
    }
    json doc = {{"nodes", std::move(nodes)}, {"arcs", std::move(arcs)}};
    if (flow)
        doc["max_flow"] = to_string(flow->value);
    return doc;
}

void write_plan_csv(std::ostream& out, const CouplingPlan& plan, const MarkovChain& chain)
{
    out << "x_path,y_path,mass\n";
    const auto coupling = plan.to_trajectory_coupling(chain);
    for (auto& [key, pair] : coupling.masses())
        out << path_to_string(key.first, chain) << ',' << path_to_string(key.second, chain) << ','
            << to_string(pair) << '\n';
}

} // namespace segchain
