// Checks an arbitrary plan against a ground mission, reporting every
// violation (never just the first) in a canonical order.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ortacplus/analysis.hpp"
#include "ortacplus/model.hpp"

namespace ortac::validator {

enum class ViolationKind {
    BadInit,
    IllegalMove,
    CapacityExceeded,
    GoalUnsatisfied,
    VisitUnsatisfied,
    AvoidViolated,
    SupportViolated,
    HorizonMismatch,
};

const char *to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind = ViolationKind::BadInit;
    std::optional<std::string> agent;
    std::optional<Location> location;
    std::optional<int> timestep;
    std::optional<int> constraint_index;  // index into GroundMission::ground
    std::string message;

    bool operator==(const Violation &) const = default;
};

// Empty result iff the plan satisfies the mission end to end: inits, step
// legality, capacities, and every ground constraint. Malformed plans yield
// plumbing violations (HorizonMismatch, IllegalMove) rather than errors.
std::vector<Violation> validate(const Plan &p, const analysis::GroundMission &gm);

}  // namespace ortac::validator
