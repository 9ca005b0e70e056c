// PDDL3 export of a ground mission: a fixed movement domain plus a problem
// whose goal and trajectory constraints mirror the mission constraints.
// Emission is deterministic and golden-file exact.

#pragma once

#include <string>

#include "ortacplus/analysis.hpp"

namespace ortac::pddl {

struct PddlPair {
    std::string domain_text;
    std::string problem_text;
    bool operator==(const PddlPair &) const = default;
};

std::string emit_domain(const analysis::GroundMission &gm);
std::string emit_problem(const analysis::GroundMission &gm);
PddlPair emit(const analysis::GroundMission &gm);

}  // namespace ortac::pddl
