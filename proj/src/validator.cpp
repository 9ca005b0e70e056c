#include "ortacplus/validator.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace ortac::validator {

const char *to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::BadInit: return "BadInit";
    case ViolationKind::IllegalMove: return "IllegalMove";
    case ViolationKind::CapacityExceeded: return "CapacityExceeded";
    case ViolationKind::GoalUnsatisfied: return "GoalUnsatisfied";
    case ViolationKind::VisitUnsatisfied: return "VisitUnsatisfied";
    case ViolationKind::AvoidViolated: return "AvoidViolated";
    case ViolationKind::SupportViolated: return "SupportViolated";
    case ViolationKind::HorizonMismatch: return "HorizonMismatch";
    }
    return "?";
}

namespace {

struct Checker {
    const Plan &p;
    const analysis::GroundMission &gm;
    std::vector<Violation> out;

    // loc(a, t), defined only where the trajectory provides it.
    const Location *loc(const std::string &agent, int t) const {
        const std::vector<Location> *traj = p.traj_of(agent);
        if (!traj || t < 0 || static_cast<size_t>(t) >= traj->size()) return nullptr;
        return &(*traj)[t];
    }

    void add(ViolationKind kind, std::optional<std::string> agent,
             std::optional<Location> location, std::optional<int> timestep,
             std::optional<int> constraint_index, std::string message) {
        out.push_back({kind, std::move(agent), std::move(location), timestep,
                       constraint_index, std::move(message)});
    }

    void check_shape() {
        size_t want = static_cast<size_t>(p.horizon) + 1;
        for (const Agent &a : gm.agents) {
            const std::vector<Location> *traj = p.traj_of(a.name);
            if (!traj) {
                add(ViolationKind::HorizonMismatch, a.name, std::nullopt, std::nullopt,
                    std::nullopt, "no trajectory for agent '" + a.name + "'");
            } else if (traj->size() != want) {
                add(ViolationKind::HorizonMismatch, a.name, std::nullopt, std::nullopt,
                    std::nullopt,
                    "trajectory of '" + a.name + "' has " + std::to_string(traj->size()) +
                        " entries, expected " + std::to_string(want));
            }
        }
        for (const auto &[name, traj] : p.traj) {
            if (gm.agent_index(name) < 0)
                add(ViolationKind::HorizonMismatch, name, std::nullopt, std::nullopt,
                    std::nullopt, "trajectory for undeclared agent '" + name + "'");
        }
    }

    void check_inits() {
        for (const Agent &a : gm.agents) {
            const Location *l0 = loc(a.name, 0);
            if (l0 && *l0 != a.init)
                add(ViolationKind::BadInit, a.name, *l0, 0, std::nullopt,
                    "agent '" + a.name + "' starts at " + to_string(*l0) + ", declared init is " +
                        to_string(a.init));
        }
    }

    void check_moves() {
        for (const Agent &a : gm.agents) {
            const std::vector<Location> *traj = p.traj_of(a.name);
            if (!traj) continue;
            for (size_t t = 0; t < traj->size(); ++t) {
                if (!gm.graph.has((*traj)[t])) {
                    add(ViolationKind::IllegalMove, a.name, (*traj)[t], static_cast<int>(t),
                        std::nullopt,
                        "agent '" + a.name + "' occupies undeclared " + to_string((*traj)[t]));
                    continue;
                }
                if (t == 0) continue;
                const Location &prev = (*traj)[t - 1];
                if (!gm.graph.has(prev)) continue;  // already reported
                std::vector<Location> legal = successors(prev, gm.graph);
                if (std::find(legal.begin(), legal.end(), (*traj)[t]) == legal.end())
                    add(ViolationKind::IllegalMove, a.name, (*traj)[t], static_cast<int>(t),
                        std::nullopt,
                        "agent '" + a.name + "' jumps from " + to_string(prev) + " to " +
                            to_string((*traj)[t]));
            }
        }
    }

    // Two agents may not exchange positions in one step (they would pass
    // through each other).
    void check_exchanges() {
        for (int t = 1; t <= p.horizon; ++t) {
            for (size_t i = 0; i < gm.agents.size(); ++i) {
                for (size_t j = i + 1; j < gm.agents.size(); ++j) {
                    const std::string &a = gm.agents[i].name;
                    const std::string &b = gm.agents[j].name;
                    const Location *a0 = loc(a, t - 1), *a1 = loc(a, t);
                    const Location *b0 = loc(b, t - 1), *b1 = loc(b, t);
                    if (!a0 || !a1 || !b0 || !b1) continue;
                    if (*a0 == *b0) continue;
                    if (*a1 == *b0 && *b1 == *a0)
                        add(ViolationKind::IllegalMove, a, *a1, t, std::nullopt,
                            "agents '" + a + "' and '" + b +
                                "' exchange positions at t=" + std::to_string(t));
                }
            }
        }
    }

    void check_capacities() {
        for (int t = 0; t <= p.horizon; ++t) {
            std::map<Location, int> occupancy;
            for (const Agent &a : gm.agents) {
                const Location *l = loc(a.name, t);
                if (l && gm.graph.has(*l)) ++occupancy[*l];
            }
            for (const auto &[l, count] : occupancy) {
                int cap = gm.graph.capacity(l);
                if (count > cap)
                    add(ViolationKind::CapacityExceeded, std::nullopt, l, t, std::nullopt,
                        std::to_string(count) + " agents at " + to_string(l) + " at t=" +
                            std::to_string(t) + ", capacity " + std::to_string(cap));
            }
        }
    }

    void check_constraint(int index, const GroundConstraint &gc) {
        if (const auto *g = std::get_if<GroundNodeGoal>(&gc)) {
            for (const std::string &a : g->agents) {
                const Location *l = loc(a, p.horizon);
                if (l && *l == Location{g->node}) return;
            }
            add(ViolationKind::GoalUnsatisfied, std::nullopt, g->node, p.horizon, index,
                "no agent from " + agents_text(g->agents) + " is at node " +
                    to_string(g->node) + " at the final state");
        } else if (const auto *v = std::get_if<GroundNodeVisit>(&gc)) {
            check_visit(index, Location{v->node}, v->agents);
        } else if (const auto *ev = std::get_if<GroundEdgeVisit>(&gc)) {
            check_visit(index, Location{ev->edge}, ev->agents);
        } else if (const auto *na = std::get_if<GroundNodeAvoid>(&gc)) {
            check_avoid(index, Location{na->node}, na->agents);
        } else if (const auto *ea = std::get_if<GroundEdgeAvoid>(&gc)) {
            check_avoid(index, Location{ea->edge}, ea->agents);
        } else if (const auto *sf = std::get_if<GroundNodeSupportedFrom>(&gc)) {
            for (int t = 0; t <= p.horizon; ++t) {
                for (const Agent &a : gm.agents) {
                    const Location *l = loc(a.name, t);
                    if (!l || *l != Location{sf->node}) continue;
                    bool supported = false;
                    for (const Agent &b : gm.agents) {
                        if (b.name == a.name) continue;
                        const Location *lb = loc(b.name, t);
                        if (lb && *lb == Location{sf->from}) {
                            supported = true;
                            break;
                        }
                    }
                    if (!supported)
                        add(ViolationKind::SupportViolated, a.name, sf->node, t, index,
                            "agent '" + a.name + "' is at node " + to_string(sf->node) +
                                " at t=" + std::to_string(t) + " with no support at node " +
                                to_string(sf->from));
                }
            }
        } else if (const auto *s = std::get_if<GroundSupport>(&gc)) {
            for (int t = 0; t <= p.horizon; ++t) {
                const Location *l1 = loc(s->unit1, t);
                if (!l1 || *l1 != Location{s->node1}) continue;
                const Location *l2 = loc(s->unit2, t);
                if (!l2 || *l2 != Location{s->node2})
                    add(ViolationKind::SupportViolated, s->unit1, s->node1, t, index,
                        "'" + s->unit1 + "' is at node " + to_string(s->node1) + " at t=" +
                            std::to_string(t) + " but '" + s->unit2 + "' is not at node " +
                            to_string(s->node2));
            }
        }
    }

    void check_visit(int index, const Location &l, const std::vector<std::string> &agents) {
        for (const std::string &a : agents) {
            const std::vector<Location> *traj = p.traj_of(a);
            if (!traj) continue;
            for (const Location &step : *traj)
                if (step == l) return;
        }
        add(ViolationKind::VisitUnsatisfied, std::nullopt, l, std::nullopt, index,
            "no agent from " + agents_text(agents) + " ever visits " + to_string(l));
    }

    void check_avoid(int index, const Location &l, const std::vector<std::string> &agents) {
        for (const std::string &a : agents) {
            const std::vector<Location> *traj = p.traj_of(a);
            if (!traj) continue;
            for (size_t t = 0; t < traj->size(); ++t) {
                if ((*traj)[t] == l)
                    add(ViolationKind::AvoidViolated, a, l, static_cast<int>(t), index,
                        "agent '" + a + "' is at forbidden " + to_string(l) + " at t=" +
                            std::to_string(t));
            }
        }
    }

    static std::string agents_text(const std::vector<std::string> &agents) {
        std::string out = "{";
        for (size_t i = 0; i < agents.size(); ++i) {
            if (i) out += ", ";
            out += agents[i];
        }
        return out + "}";
    }

    void sort_canonical() {
        auto agent_rank = [&](const std::optional<std::string> &a) {
            if (!a) return std::numeric_limits<int>::max();
            int idx = gm.agent_index(*a);
            return idx < 0 ? std::numeric_limits<int>::max() - 1 : idx;
        };
        std::stable_sort(out.begin(), out.end(), [&](const Violation &x, const Violation &y) {
            int tx = x.timestep.value_or(std::numeric_limits<int>::max());
            int ty = y.timestep.value_or(std::numeric_limits<int>::max());
            if (tx != ty) return tx < ty;
            int ax = agent_rank(x.agent), ay = agent_rank(y.agent);
            if (ax != ay) return ax < ay;
            if (x.kind != y.kind) return x.kind < y.kind;
            return x.constraint_index.value_or(-1) < y.constraint_index.value_or(-1);
        });
    }
};

}  // namespace

std::vector<Violation> validate(const Plan &p, const analysis::GroundMission &gm) {
    Checker c{p, gm, {}};
    c.check_shape();
    c.check_inits();
    c.check_moves();
    c.check_exchanges();
    c.check_capacities();
    for (size_t i = 0; i < gm.ground.size(); ++i)
        c.check_constraint(static_cast<int>(i), gm.ground[i]);
    c.sort_canonical();
    return c.out;
}

}  // namespace ortac::validator
