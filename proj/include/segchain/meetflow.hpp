#pragma once

#include "segchain/coupling.hpp"
#include "segchain/separation.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

namespace segchain {

struct Trajectory {
    Path states;
    Rational probability;
};

// Every positive-probability path of length T+1 from `start`, in
// lexicographic order of the state indices.
struct TrajectorySet {
    State start;
    std::size_t horizon;
    std::vector<Trajectory> paths;
};

inline constexpr std::size_t default_trajectory_cap = 200000;

// Throws BudgetExceeded when more than `cap` paths exist.
TrajectorySet enumerate_trajectories(const MarkovChain& chain, State start, std::size_t horizon,
                                     std::size_t cap = default_trajectory_cap);

// Node layout: 0 = source, 1 = sink, then one node per x-path, then one
// per y-path. Source and sink arcs carry the path probabilities; middle
// arcs (capacity 1) join paths that occupy a common state at a common time.
class FlowNetwork {
public:
    struct MiddleArc {
        std::uint32_t x; // index into xs().paths
        std::uint32_t y; // index into ys().paths
    };

    FlowNetwork(TrajectorySet xs, TrajectorySet ys, std::vector<MiddleArc> middle);

    const TrajectorySet& xs() const { return xs_; }
    const TrajectorySet& ys() const { return ys_; }
    // Sorted by (x, y).
    const std::vector<MiddleArc>& middle() const { return middle_; }

    std::size_t node_count() const { return 2 + xs_.paths.size() + ys_.paths.size(); }
    static constexpr std::size_t source = 0;
    static constexpr std::size_t sink = 1;
    std::size_t x_node(std::size_t i) const { return 2 + i; }
    std::size_t y_node(std::size_t j) const { return 2 + xs_.paths.size() + j; }

private:
    TrajectorySet xs_;
    TrajectorySet ys_;
    std::vector<MiddleArc> middle_;
};

bool paths_intersect(const Path& a, const Path& b);

// Throws DimensionMismatch on unequal horizons. The parallel build splits
// the intersection tests over x-paths; both executions produce the same
// arc list.
FlowNetwork build_flow_network(TrajectorySet xs, TrajectorySet ys,
                               Execution exec = Execution::serial);

struct MaxFlow {
    Rational value;
    std::vector<Rational> middle_flow; // aligned with FlowNetwork::middle()
};

// Dinic's algorithm (BFS level graphs, blocking flows) in exact arithmetic.
MaxFlow max_flow(const FlowNetwork& net);

// Optimal pairing from a maximum flow plus the leftover masses.
class CouplingPlan {
public:
    CouplingPlan(const FlowNetwork& net, const MaxFlow& flow);

    const TrajectorySet& xs() const { return xs_; }
    const TrajectorySet& ys() const { return ys_; }
    const std::map<std::pair<std::uint32_t, std::uint32_t>, Rational>& paired() const
    {
        return paired_;
    }
    const std::vector<Rational>& residual_x() const { return residual_x_; }
    const std::vector<Rational>& residual_y() const { return residual_y_; }
    const Rational& total_flow() const { return total_flow_; }

    // q_xy + r_x r_y / (1 - F); the second term is dropped when F = 1.
    Rational joint_mass(std::uint32_t i, std::uint32_t j) const;

    // Sum of the joint mass over pairs that share a state at some time.
    Rational meeting_probability() const;

    TrajectoryCoupling to_trajectory_coupling(const MarkovChain& chain) const;

private:
    TrajectorySet xs_;
    TrajectorySet ys_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> paired_;
    std::vector<Rational> residual_x_;
    std::vector<Rational> residual_y_;
    Rational total_flow_;
    std::vector<FlowNetwork::MiddleArc> intersecting_;
};

CouplingPlan extract_coupling(const FlowNetwork& net, const MaxFlow& flow);

Rational optimal_meeting_probability(const MarkovChain& chain, State x, State y,
                                     std::size_t horizon,
                                     std::size_t cap = default_trajectory_cap,
                                     Execution exec = Execution::serial);

struct DualityOptions {
    std::size_t trajectory_cap = default_trajectory_cap;
    std::uint64_t leaf_budget = std::uint64_t{1} << 26;
    Execution execution = Execution::serial;
};

struct DualityReport {
    Rational max_flow;          // C_T
    Rational separation;        // S_T by brute force
    Rational meeting;           // measured on the extracted coupling
    SeparatingSequence sequence; // a maximizing sequence
    bool holds;                 // max_flow == 2 - separation == meeting
};

DualityReport verify_duality(const MarkovChain& chain, State x, State y, std::size_t horizon,
                             const DualityOptions& options = {});

nlohmann::json network_to_json(const FlowNetwork& net, const MarkovChain& chain,
                               const MaxFlow* flow = nullptr);

// CSV rows x_path,y_path,mass with paths written as label|label|...
void write_plan_csv(std::ostream& out, const CouplingPlan& plan, const MarkovChain& chain);

std::string path_to_string(const Path& path, const MarkovChain& chain);

} // namespace segchain
