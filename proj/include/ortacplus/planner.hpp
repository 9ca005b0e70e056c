// Makespan-optimal planning over the node/edge successor graph: iterative
// deepening with forward checking, plus an exhaustive breadth-first oracle
// for test-scale cross-checking.

#pragma once

#include <optional>
#include <variant>

#include "ortacplus/analysis.hpp"
#include "ortacplus/model.hpp"

namespace ortac::planner {

struct PlannerConfig {
    int max_horizon = 64;
    int timeout_ms = 60000;
    unsigned seed = 0;  // nonzero permutes per-agent move ordering
};

struct Solved {
    Plan plan;
    bool operator==(const Solved &) const = default;
};

// No plan with horizon <= horizon exists.
struct InfeasibleUpTo {
    int horizon = 0;
    bool operator==(const InfeasibleUpTo &) const = default;
};

struct Timeout {
    std::optional<Plan> best_known;
    bool operator==(const Timeout &) const = default;
};

using PlanOutcome = std::variant<Solved, InfeasibleUpTo, Timeout>;

struct InstanceTooLargeError : ModelError {
    using ModelError::ModelError;
};

// Admissible makespan bound: the largest over all goal/visit constraints of
// the smallest BFS distance any candidate agent has to the required location
// (that agent's avoided locations removed). Returns max_horizon + 1 when some
// required location is unreachable for every candidate.
int lower_bound(const analysis::GroundMission &gm, int max_horizon = 64);

// Iterative deepening on the horizon from lower_bound(gm). Solved plans are
// makespan-optimal and pass the validator; InfeasibleUpTo(h) proves no plan
// with horizon <= h exists. Deterministic for a fixed seed.
PlanOutcome plan(const analysis::GroundMission &gm, const PlannerConfig &cfg = {});

// Exhaustive breadth-first search over joint states. Testing oracle: agrees
// with plan() on feasibility and optimal horizon wherever both run. Refuses
// instances beyond |V|+|E| <= 12, agents <= 3 unless ignore_size_guard.
PlanOutcome brute_force_plan(const analysis::GroundMission &gm, int max_horizon,
                             bool ignore_size_guard = false);

}  // namespace ortac::planner
