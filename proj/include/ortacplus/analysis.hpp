// Selector resolution, and-expansion, and static validation: turns a parsed
// Mission into a GroundMission whose constraints reference only concrete
// agents and locations.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ortacplus/model.hpp"

namespace ortac::analysis {

enum class Severity { Error, Warning };

enum class StaticCode {
    UnknownLocation,
    UnknownAgent,
    UnknownTag,
    EmptySelector,
    InitCapacityExceeded,
    TypeMismatchInFilter,
    GoalUnreachableStatic,
    MissingAttribute,
};

const char *to_string(StaticCode code);

struct StaticDiagnostic {
    Severity severity = Severity::Error;
    StaticCode code = StaticCode::UnknownLocation;
    std::string message;
};

struct GroundMission {
    Graph graph;
    std::vector<Agent> agents;
    std::vector<GroundConstraint> ground;

    int agent_index(const std::string &name) const;

    bool operator==(const GroundMission &) const = default;
};

// Agent names matching the selector, deduplicated and ordered by declaration
// order. An empty result is an EmptySelector error.
std::vector<std::string> resolve_agent_selector(const Selector &sel, const Mission &m,
                                                std::vector<StaticDiagnostic> &diags);

enum class LocationKind { Node, Edge };

std::vector<Location> resolve_location_selector(const Selector &sel, const Mission &m,
                                                LocationKind kind,
                                                std::vector<StaticDiagnostic> &diags);

// Applies singleton sugar and expands the first list argument: one ground
// constraint per location, each carrying the full resolved agent set.
std::vector<GroundConstraint> and_expand(const Constraint &c, const Mission &m,
                                         std::vector<StaticDiagnostic> &diags);

struct CheckResult {
    std::optional<GroundMission> ground;  // absent iff an Error diagnostic exists
    std::vector<StaticDiagnostic> diagnostics;
    bool ok() const { return ground.has_value(); }
};

// Resolves every constraint and runs the static sanity checks (initial
// capacities, static goal reachability).
CheckResult check_static(const Mission &m);

}  // namespace ortac::analysis
