#include "ortacplus/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace ortac::pddl {

namespace {

std::string node_name(NodeId n) { return "n" + std::to_string(n.value); }

std::string edge_name(EdgeId e) {
    return "e" + std::to_string(e.a.value) + "-" + std::to_string(e.b.value);
}

std::string loc_name(const Location &l) {
    if (is_node(l)) return node_name(std::get<NodeId>(l));
    return edge_name(std::get<EdgeId>(l));
}

// PDDL object names: lowercase letters, digits, hyphens, starting with a
// letter. Collisions (with each other or generated location names) get a
// numeric suffix.
class NameTable {
public:
    explicit NameTable(const analysis::GroundMission &gm) {
        for (const NodeId &n : gm.graph.nodes()) taken_.insert(node_name(n));
        for (const EdgeId &e : gm.graph.edges()) taken_.insert(edge_name(e));
        for (const Agent &a : gm.agents) {
            std::string base = sanitize(a.name);
            std::string name = base;
            for (int suffix = 2; taken_.count(name); ++suffix)
                name = base + "-" + std::to_string(suffix);
            taken_.insert(name);
            agent_names_[a.name] = name;
            if (name != a.name) renames_.push_back({a.name, name});
        }
    }

    const std::string &agent(const std::string &original) const {
        return agent_names_.at(original);
    }
    const std::vector<std::pair<std::string, std::string>> &renames() const {
        return renames_;
    }

private:
    static std::string sanitize(const std::string &name) {
        std::string out;
        for (char c : name) {
            unsigned char u = static_cast<unsigned char>(c);
            if (std::isalpha(u))
                out.push_back(static_cast<char>(std::tolower(u)));
            else if (std::isdigit(u) || c == '-')
                out.push_back(c);
            else
                out.push_back('-');
        }
        if (out.empty() || !std::isalpha(static_cast<unsigned char>(out[0])))
            out.insert(out.begin(), 'a');
        return out;
    }

    std::set<std::string> taken_;
    std::map<std::string, std::string> agent_names_;
    std::vector<std::pair<std::string, std::string>> renames_;
};

std::string agent_disjunction(const NameTable &names, const std::vector<std::string> &agents,
                              const std::string &var) {
    std::string out = "(or";
    for (const std::string &a : agents) out += " (= " + var + " " + names.agent(a) + ")";
    return out + ")";
}

std::string at_disjunction(const NameTable &names, const std::vector<std::string> &agents,
                           const std::string &loc) {
    std::string out = "(or";
    for (const std::string &a : agents) out += " (at " + names.agent(a) + " " + loc + ")";
    return out + ")";
}

}  // namespace

std::string emit_domain(const analysis::GroundMission &gm) {
    (void)gm;  // the movement domain is mission-independent
    return
        "(define (domain ortacplus)\n"
        "  (:requirements :strips :typing :equality :numeric-fluents :constraints"
        " :universal-preconditions :existential-preconditions)\n"
        "  (:types\n"
        "    agent location - object\n"
        "    node edge - location)\n"
        "  (:predicates\n"
        "    (at ?a - agent ?l - location)\n"
        "    (adjacent ?l1 ?l2 - location))\n"
        "  (:functions\n"
        "    (occupancy ?l - location)\n"
        "    (capacity ?l - location))\n"
        "  (:action move\n"
        "    :parameters (?a - agent ?from ?to - location)\n"
        "    :precondition (and\n"
        "      (at ?a ?from)\n"
        "      (adjacent ?from ?to)\n"
        "      (< (occupancy ?to) (capacity ?to)))\n"
        "    :effect (and\n"
        "      (not (at ?a ?from))\n"
        "      (at ?a ?to)\n"
        "      (decrease (occupancy ?from) 1)\n"
        "      (increase (occupancy ?to) 1))))\n";
}

std::string emit_problem(const analysis::GroundMission &gm) {
    NameTable names(gm);
    std::string out;

    for (const auto &[original, renamed] : names.renames())
        out += ";; renamed: " + original + " -> " + renamed + "\n";

    out += "(define (problem ortacplus-mission)\n";
    out += "  (:domain ortacplus)\n";

    // Objects.
    std::string objects;
    if (!gm.agents.empty()) {
        objects += "\n   ";
        for (const Agent &a : gm.agents) objects += " " + names.agent(a.name);
        objects += " - agent";
    }
    if (!gm.graph.nodes().empty()) {
        objects += "\n   ";
        for (const NodeId &n : gm.graph.nodes()) objects += " " + node_name(n);
        objects += " - node";
    }
    if (!gm.graph.edges().empty()) {
        objects += "\n   ";
        for (const EdgeId &e : gm.graph.edges()) objects += " " + edge_name(e);
        objects += " - edge";
    }
    out += "  (:objects" + objects + ")\n";

    // Init: positions, adjacency, occupancy and capacity fluents.
    std::vector<Location> all_locs;
    for (const NodeId &n : gm.graph.nodes()) all_locs.push_back(n);
    for (const EdgeId &e : gm.graph.edges()) all_locs.push_back(e);

    std::map<Location, int> occupancy;
    for (const Location &l : all_locs) occupancy[l] = 0;
    std::string init;
    for (const Agent &a : gm.agents) {
        init += "\n    (at " + names.agent(a.name) + " " + loc_name(a.init) + ")";
        ++occupancy[a.init];
    }
    for (const NodeId &n : gm.graph.nodes()) {
        for (const EdgeId &e : gm.graph.edges()) {
            if (e.a != n && e.b != n) continue;
            init += "\n    (adjacent " + node_name(n) + " " + edge_name(e) + ")";
            init += "\n    (adjacent " + edge_name(e) + " " + node_name(n) + ")";
        }
    }
    for (const Location &l : all_locs)
        init += "\n    (= (occupancy " + loc_name(l) + ") " +
                std::to_string(occupancy[l]) + ")";
    for (const Location &l : all_locs)
        init += "\n    (= (capacity " + loc_name(l) + ") " +
                std::to_string(gm.graph.capacity(l)) + ")";
    out += "  (:init" + init + ")\n";

    // Goal: one existential clause per ground node goal.
    std::vector<std::string> goal_clauses;
    std::vector<std::string> trajectory_clauses;
    for (const GroundConstraint &gc : gm.ground) {
        if (const auto *g = std::get_if<GroundNodeGoal>(&gc)) {
            goal_clauses.push_back("(exists (?a - agent) (and " +
                                   agent_disjunction(names, g->agents, "?a") + " (at ?a " +
                                   node_name(g->node) + ")))");
        } else if (const auto *v = std::get_if<GroundNodeVisit>(&gc)) {
            trajectory_clauses.push_back(
                "(sometime " + at_disjunction(names, v->agents, node_name(v->node)) + ")");
        } else if (const auto *ev = std::get_if<GroundEdgeVisit>(&gc)) {
            trajectory_clauses.push_back(
                "(sometime " + at_disjunction(names, ev->agents, edge_name(ev->edge)) + ")");
        } else if (const auto *na = std::get_if<GroundNodeAvoid>(&gc)) {
            std::string conj = "(and";
            for (const std::string &a : na->agents)
                conj += " (not (at " + names.agent(a) + " " + node_name(na->node) + "))";
            trajectory_clauses.push_back("(always " + conj + "))");
        } else if (const auto *ea = std::get_if<GroundEdgeAvoid>(&gc)) {
            std::string conj = "(and";
            for (const std::string &a : ea->agents)
                conj += " (not (at " + names.agent(a) + " " + edge_name(ea->edge) + "))";
            trajectory_clauses.push_back("(always " + conj + "))");
        } else if (const auto *sf = std::get_if<GroundNodeSupportedFrom>(&gc)) {
            trajectory_clauses.push_back(
                "(always (forall (?a - agent) (imply (at ?a " + node_name(sf->node) +
                ") (exists (?b - agent) (and (not (= ?b ?a)) (at ?b " + node_name(sf->from) +
                "))))))");
        } else if (const auto *s = std::get_if<GroundSupport>(&gc)) {
            trajectory_clauses.push_back("(always (imply (at " + names.agent(s->unit1) +
                                         " " + node_name(s->node1) + ") (at " +
                                         names.agent(s->unit2) + " " + node_name(s->node2) +
                                         ")))");
        }
    }

    if (goal_clauses.empty()) {
        out += "  (:goal (and ))";
    } else {
        out += "  (:goal (and";
        for (const std::string &clause : goal_clauses) out += "\n    " + clause;
        out += "))";
    }

    if (!trajectory_clauses.empty()) {
        out += "\n  (:constraints (and";
        for (const std::string &clause : trajectory_clauses) out += "\n    " + clause;
        out += "))";
    }

    out += ")\n";
    return out;
}

PddlPair emit(const analysis::GroundMission &gm) {
    return {emit_domain(gm), emit_problem(gm)};
}

}  // namespace ortac::pddl
