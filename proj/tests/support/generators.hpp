// Seeded random generators used by the property and acceptance suites:
// small oracle-scale instances, richer missions for round-trip testing,
// random plans, and the targeted plan-mutation harness.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ortacplus/analysis.hpp"
#include "ortacplus/model.hpp"
#include "ortacplus/validator.hpp"

namespace test_support {

using namespace ortac;

// Small instance within the brute-force guard (|V|+|E| <= 12, <= 3 agents),
// with explicit selectors only; always passes check_static.
inline Mission random_oracle_instance(unsigned seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    Mission m;
    int n_nodes = pick(2, 6);
    for (int i = 1; i <= n_nodes; ++i) m.graph.add_node(NodeId{i});

    std::vector<EdgeId> candidates;
    for (int u = 1; u <= n_nodes; ++u)
        for (int v = u + 1; v <= n_nodes; ++v) candidates.push_back(EdgeId{{u}, {v}});
    std::shuffle(candidates.begin(), candidates.end(), rng);
    int max_edges = std::min<int>({7, 12 - n_nodes, static_cast<int>(candidates.size())});
    int n_edges = pick(std::min(1, max_edges), max_edges);
    for (int i = 0; i < n_edges; ++i) m.graph.add_edge(candidates[i]);

    std::vector<Location> locs;
    for (const NodeId &n : m.graph.nodes()) locs.push_back(n);
    for (const EdgeId &e : m.graph.edges()) locs.push_back(e);
    for (const Location &l : locs)
        if (pick(0, 9) == 0) m.graph.set_capacity(l, 2);

    int n_agents = pick(1, 3);
    std::vector<Location> spots = locs;
    std::shuffle(spots.begin(), spots.end(), rng);
    n_agents = std::min<int>(n_agents, static_cast<int>(spots.size()));
    for (int i = 0; i < n_agents; ++i)
        m.agents.push_back(Agent{"u" + std::to_string(i + 1), spots[i], {}});

    auto random_agents = [&]() {
        ExplicitAgents out;
        int count = pick(1, n_agents);
        std::vector<int> idx(n_agents);
        for (int i = 0; i < n_agents; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i = 0; i < count; ++i) out.names.push_back(m.agents[idx[i]].name);
        return out;
    };
    auto random_nodes = [&](int max_count) {
        ExplicitNodes out;
        int count = pick(1, std::min(max_count, n_nodes));
        std::vector<NodeId> all(m.graph.nodes().begin(), m.graph.nodes().end());
        std::shuffle(all.begin(), all.end(), rng);
        for (int i = 0; i < count; ++i) out.nodes.push_back(all[i]);
        return out;
    };
    auto random_node = [&]() {
        std::vector<NodeId> all(m.graph.nodes().begin(), m.graph.nodes().end());
        return all[pick(0, static_cast<int>(all.size()) - 1)];
    };
    auto random_edges = [&](int max_count) {
        ExplicitEdges out;
        std::vector<EdgeId> all(m.graph.edges().begin(), m.graph.edges().end());
        int count = pick(1, std::min<int>(max_count, static_cast<int>(all.size())));
        std::shuffle(all.begin(), all.end(), rng);
        for (int i = 0; i < count; ++i) out.edges.push_back(all[i]);
        return out;
    };

    int n_constraints = pick(0, 3);
    for (int i = 0; i < n_constraints; ++i) {
        switch (pick(0, 6)) {
        case 0: m.constraints.push_back(NodeGoal{random_nodes(2), random_agents()}); break;
        case 1: m.constraints.push_back(NodeVisit{random_nodes(2), random_agents()}); break;
        case 2:
            if (n_edges > 0)
                m.constraints.push_back(EdgeVisit{random_edges(2), random_agents()});
            break;
        case 3: m.constraints.push_back(NodeAvoid{random_nodes(2), random_agents()}); break;
        case 4:
            if (n_edges > 0)
                m.constraints.push_back(EdgeAvoid{random_edges(2), random_agents()});
            break;
        case 5:
            m.constraints.push_back(NodeSupportedFrom{random_nodes(2), random_node()});
            break;
        case 6: {
            const std::string &u1 = m.agents[pick(0, n_agents - 1)].name;
            const std::string &u2 = m.agents[pick(0, n_agents - 1)].name;
            m.constraints.push_back(Support{u1, random_node(), u2, random_node()});
            break;
        }
        }
    }
    return m;
}

// Random filter expression in the parser's normal form (no same-operator
// direct nesting is required; the printer parenthesizes).
inline FilterPtr random_filter(std::mt19937 &rng, const std::vector<std::string> &attrs,
                               const std::vector<std::string> &tags, int depth) {
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    if (depth == 0 || pick(0, 2) == 0) {
        if (!tags.empty() && pick(0, 2) == 0)
            return FilterNode::tag_atom(tags[pick(0, static_cast<int>(tags.size()) - 1)]);
        static const CompareOp ops[] = {CompareOp::Less,    CompareOp::LessEq,
                                        CompareOp::Greater, CompareOp::GreaterEq,
                                        CompareOp::Eq,      CompareOp::NotEq};
        CompareOp op = ops[pick(0, 5)];
        AttrValue lit;
        bool numeric = op != CompareOp::Eq && op != CompareOp::NotEq;
        if (numeric || pick(0, 1) == 0)
            lit = static_cast<double>(pick(-20, 20));
        else if (pick(0, 1) == 0)
            lit = std::string("text-") + std::to_string(pick(0, 9));
        else
            lit = TagValue{"lit" + std::to_string(pick(0, 9))};
        return FilterNode::compare(attrs[pick(0, static_cast<int>(attrs.size()) - 1)], op,
                                   lit);
    }
    switch (pick(0, 2)) {
    case 0:
        return FilterNode::negate(random_filter(rng, attrs, tags, depth - 1));
    case 1: {
        std::vector<FilterPtr> children;
        int n = pick(2, 3);
        for (int i = 0; i < n; ++i)
            children.push_back(random_filter(rng, attrs, tags, depth - 1));
        return FilterNode::conj(std::move(children));
    }
    default: {
        std::vector<FilterPtr> children;
        int n = pick(2, 3);
        for (int i = 0; i < n; ++i)
            children.push_back(random_filter(rng, attrs, tags, depth - 1));
        return FilterNode::disj(std::move(children));
    }
    }
}

// Richer mission for round-trip testing: ontology, attribute-laden agents and
// locations, every selector kind. Shapes are restricted to what the parser
// itself produces so that parse(print(m)) == m is the contract under test.
inline Mission random_roundtrip_mission(unsigned seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    Mission m = random_oracle_instance(seed ^ 0x9e3779b9u);

    std::vector<std::string> tags;
    int n_roots = pick(1, 2);
    for (int r = 0; r < n_roots; ++r) {
        std::string root = "root" + std::to_string(r);
        m.ontology.add_root(root);
        tags.push_back(root);
        for (int c = 0, n = pick(0, 2); c < n; ++c) {
            std::string child = root + "c" + std::to_string(c);
            m.ontology.add_child(root, child);
            tags.push_back(child);
            if (pick(0, 1)) {
                std::string leaf = child + "x";
                m.ontology.add_child(child, leaf);
                tags.push_back(leaf);
            }
        }
    }

    std::vector<std::string> attr_names = {"width", "speed", "zone", "label"};
    auto random_value = [&]() -> AttrValue {
        switch (pick(0, 3)) {
        case 0: return static_cast<double>(pick(0, 40));
        case 1: return 0.5 + pick(0, 20);  // forces a decimal literal
        case 2: return std::string("some \"text\" with \\ escapes #").substr(0, 5 + pick(0, 20));
        default: return TagValue{tags[pick(0, static_cast<int>(tags.size()) - 1)]};
        }
    };

    for (Agent &a : m.agents) {
        for (int i = 0, n = pick(0, 3); i < n; ++i)
            a.attrs["a" + std::to_string(i)] = random_value();
    }
    std::vector<Location> locs;
    for (const NodeId &n : m.graph.nodes()) locs.push_back(n);
    for (const EdgeId &e : m.graph.edges()) locs.push_back(e);
    for (const Location &l : locs)
        if (pick(0, 2) == 0)
            m.graph.set_attr(l, attr_names[pick(0, 3)], random_value());

    // Swap some selectors for tag queries / filters. A filter whose whole
    // body is one tag atom would reparse as a TagQuery, so reroll those: the
    // parser never produces that shape.
    auto nontrivial_filter = [&](int depth) {
        FilterPtr f = random_filter(rng, attr_names, tags, depth);
        while (f->kind == FilterNode::Kind::Tag)
            f = random_filter(rng, attr_names, tags, depth);
        return f;
    };
    if (!m.agents.empty()) {
        int extra = pick(0, 2);
        for (int i = 0; i < extra; ++i) {
            Selector agents = pick(0, 1)
                                  ? Selector{TagQuery{tags[pick(0, static_cast<int>(tags.size()) - 1)]}}
                                  : Selector{FilterExpr{nontrivial_filter(2)}};
            Selector locs_sel = pick(0, 1)
                                    ? Selector{FilterExpr{nontrivial_filter(1)}}
                                    : Selector{ExplicitNodes{{*m.graph.nodes().begin()}}};
            m.constraints.push_back(NodeAvoid{std::move(locs_sel), std::move(agents)});
        }
    }
    return m;
}

// Random plan over a mission: mostly legal random walks, sometimes corrupted.
inline Plan random_plan(const analysis::GroundMission &gm, unsigned seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    std::vector<Location> locs;
    for (const NodeId &n : gm.graph.nodes()) locs.push_back(n);
    for (const EdgeId &e : gm.graph.edges()) locs.push_back(e);

    Plan p;
    p.horizon = pick(0, 6);
    for (const Agent &a : gm.agents) {
        std::vector<Location> traj{a.init};
        for (int t = 1; t <= p.horizon; ++t) {
            std::vector<Location> succ = successors(traj.back(), gm.graph);
            traj.push_back(succ[pick(0, static_cast<int>(succ.size()) - 1)]);
        }
        if (!locs.empty() && pick(0, 4) == 0)
            traj[pick(0, p.horizon)] = locs[pick(0, static_cast<int>(locs.size()) - 1)];
        p.traj[a.name] = std::move(traj);
    }
    return p;
}

// One targeted plan mutation with the violation kind it must trigger.
struct Mutation {
    Plan plan;
    validator::ViolationKind expected;
    std::string description;
};

// Generates targeted single-point mutations of a valid plan. Every mutation
// is violating by construction; `expected` names the violation kind that must
// appear (exactly classifiable for capacity and avoid mutations).
std::vector<Mutation> make_mutations(const Plan &valid, const analysis::GroundMission &gm,
                                     size_t want, unsigned seed);

}  // namespace test_support
