// Core domain types for ORTAC+ missions: graph, locations, agents,
// attribute ontology, constraints and plans. Everything here is a plain
// value type; modules downstream (parser, analysis, planner, validator,
// pddl) build on these.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ortac {

// ---------------------------------------------------------------------------
// Errors

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidEdgeError : ModelError {
    using ModelError::ModelError;
};

struct UnknownLocationError : ModelError {
    using ModelError::ModelError;
};

struct UnknownTagError : ModelError {
    using ModelError::ModelError;
};

// ---------------------------------------------------------------------------
// Locations

struct NodeId {
    int value = 0;
    auto operator<=>(const NodeId &) const = default;
};

struct EdgeId {
    // Canonical form: a < b. Build through normalize_edge.
    NodeId a;
    NodeId b;
    auto operator<=>(const EdgeId &) const = default;
};

// A position is either a node or an edge of the undirected graph.
// The variant order makes nodes sort before edges, which fixes the
// canonical location order used throughout.
using Location = std::variant<NodeId, EdgeId>;

// Rejects self-loops, returns the unordered pair with the smaller id first.
EdgeId normalize_edge(NodeId u, NodeId v);

inline bool is_node(const Location &l) { return l.index() == 0; }
inline bool is_edge(const Location &l) { return l.index() == 1; }

std::string to_string(const NodeId &n);
std::string to_string(const EdgeId &e);
std::string to_string(const Location &l);

// ---------------------------------------------------------------------------
// Attribute values

// A bare identifier value; refers to an ontology tag.
struct TagValue {
    std::string name;
    auto operator<=>(const TagValue &) const = default;
};

// Number | Text | Tag
using AttrValue = std::variant<double, std::string, TagValue>;

using AttrMap = std::map<std::string, AttrValue>;

std::string to_string(const AttrValue &v);

// ---------------------------------------------------------------------------
// Filter expressions (the propositional sub-language used in selectors)

enum class CompareOp { Less, LessEq, Greater, GreaterEq, Eq, NotEq };

const char *to_string(CompareOp op);

struct FilterNode;
using FilterPtr = std::shared_ptr<const FilterNode>;

// Boolean expression over attribute comparisons and ontology tag atoms.
struct FilterNode {
    enum class Kind { Compare, Tag, Not, And, Or };

    Kind kind;
    // Compare
    std::string attr;
    CompareOp op = CompareOp::Eq;
    AttrValue literal;
    // Tag
    std::string tag;
    // Not (1 child), And/Or (2+ children)
    std::vector<FilterPtr> children;

    static FilterPtr compare(std::string attr, CompareOp op, AttrValue lit);
    static FilterPtr tag_atom(std::string tag);
    static FilterPtr negate(FilterPtr child);
    static FilterPtr conj(std::vector<FilterPtr> children);
    static FilterPtr disj(std::vector<FilterPtr> children);
};

bool filter_equal(const FilterPtr &a, const FilterPtr &b);

// Canonical textual form; reparses to an equal expression.
std::string filter_to_string(const FilterPtr &f);

// ---------------------------------------------------------------------------
// Selectors

struct ExplicitAgents {
    std::vector<std::string> names;
    auto operator<=>(const ExplicitAgents &) const = default;
};

struct ExplicitNodes {
    std::vector<NodeId> nodes;
    auto operator<=>(const ExplicitNodes &) const = default;
};

struct ExplicitEdges {
    std::vector<EdgeId> edges;
    auto operator<=>(const ExplicitEdges &) const = default;
};

struct TagQuery {
    std::string tag;
    auto operator<=>(const TagQuery &) const = default;
};

struct FilterExpr {
    FilterPtr root;
    bool operator==(const FilterExpr &o) const { return filter_equal(root, o.root); }
};

using Selector =
    std::variant<ExplicitAgents, ExplicitNodes, ExplicitEdges, TagQuery, FilterExpr>;

// ---------------------------------------------------------------------------
// Constraints (the mission predicates, before selector resolution)

struct NodeGoal {
    Selector nodes;
    Selector agents;
    bool operator==(const NodeGoal &) const = default;
};

struct NodeVisit {
    Selector nodes;
    Selector agents;
    bool operator==(const NodeVisit &) const = default;
};

struct EdgeVisit {
    Selector edges;
    Selector agents;
    bool operator==(const EdgeVisit &) const = default;
};

struct NodeAvoid {
    Selector nodes;
    Selector agents;
    bool operator==(const NodeAvoid &) const = default;
};

struct EdgeAvoid {
    Selector edges;
    Selector agents;
    bool operator==(const EdgeAvoid &) const = default;
};

struct NodeSupportedFrom {
    Selector nodes;
    NodeId from;
    bool operator==(const NodeSupportedFrom &) const = default;
};

struct Support {
    std::string unit1;
    NodeId node1;
    std::string unit2;
    NodeId node2;
    bool operator==(const Support &) const = default;
};

using Constraint = std::variant<NodeGoal, NodeVisit, EdgeVisit, NodeAvoid, EdgeAvoid,
                                NodeSupportedFrom, Support>;

// Ground constraints: selectors resolved, first list argument expanded to a
// single object. Agent sets are ordered by declaration order.

struct GroundNodeGoal {
    NodeId node;
    std::vector<std::string> agents;
    auto operator<=>(const GroundNodeGoal &) const = default;
};

struct GroundNodeVisit {
    NodeId node;
    std::vector<std::string> agents;
    auto operator<=>(const GroundNodeVisit &) const = default;
};

struct GroundEdgeVisit {
    EdgeId edge;
    std::vector<std::string> agents;
    auto operator<=>(const GroundEdgeVisit &) const = default;
};

struct GroundNodeAvoid {
    NodeId node;
    std::vector<std::string> agents;
    auto operator<=>(const GroundNodeAvoid &) const = default;
};

struct GroundEdgeAvoid {
    EdgeId edge;
    std::vector<std::string> agents;
    auto operator<=>(const GroundEdgeAvoid &) const = default;
};

struct GroundNodeSupportedFrom {
    NodeId node;
    NodeId from;
    auto operator<=>(const GroundNodeSupportedFrom &) const = default;
};

struct GroundSupport {
    std::string unit1;
    NodeId node1;
    std::string unit2;
    NodeId node2;
    auto operator<=>(const GroundSupport &) const = default;
};

using GroundConstraint =
    std::variant<GroundNodeGoal, GroundNodeVisit, GroundEdgeVisit, GroundNodeAvoid,
                 GroundEdgeAvoid, GroundNodeSupportedFrom, GroundSupport>;

std::string to_string(const GroundConstraint &c);

// ---------------------------------------------------------------------------
// Graph

class Graph {
public:
    void add_node(NodeId n);
    // Endpoints must be declared nodes; self-loops are rejected.
    void add_edge(EdgeId e);

    bool has_node(NodeId n) const;
    bool has_edge(EdgeId e) const;
    bool has(const Location &l) const;

    // Default capacity is 1; setting 1 erases the override.
    int capacity(const Location &l) const;
    void set_capacity(const Location &l, int cap);

    const AttrMap &attrs(const Location &l) const;
    void set_attr(const Location &l, const std::string &name, AttrValue value);

    const std::set<NodeId> &nodes() const { return nodes_; }
    const std::set<EdgeId> &edges() const { return edges_; }
    const std::map<Location, int> &capacity_overrides() const { return capacity_; }
    const std::map<Location, AttrMap> &all_attrs() const { return attrs_; }

    bool operator==(const Graph &) const = default;

private:
    std::set<NodeId> nodes_;
    std::set<EdgeId> edges_;
    std::map<Location, int> capacity_;
    std::map<Location, AttrMap> attrs_;
};

// Legal one-step moves from loc, in canonical order. Waiting is always legal,
// so loc itself is included. Node -> incident edges; edge -> its endpoints.
std::vector<Location> successors(const Location &loc, const Graph &g);

// ---------------------------------------------------------------------------
// Agents and ontology

struct Agent {
    std::string name;
    Location init;
    AttrMap attrs;
    bool operator==(const Agent &) const = default;
};

// Rooted forest of tags; a descendant tag satisfies a query for any ancestor.
class Ontology {
public:
    void add_root(const std::string &tag);
    // Registers both tags; rejects reparenting and cycles.
    void add_child(const std::string &parent, const std::string &child);

    bool contains(const std::string &tag) const;
    // True iff tag appears on the parent chain of sub (reflexive).
    bool descendant_or_equal(const std::string &sub, const std::string &tag) const;
    std::optional<std::string> parent_of(const std::string &tag) const;

    const std::set<std::string> &tags() const { return tags_; }
    const std::map<std::string, std::string> &parents() const { return parent_; }
    std::vector<std::string> roots() const;
    std::vector<std::string> children_of(const std::string &tag) const;

    bool operator==(const Ontology &) const = default;

private:
    std::set<std::string> tags_;
    std::map<std::string, std::string> parent_;
};

// True iff some attribute of agent is a tag at or below `tag` in the ontology.
bool matches(const Agent &agent, const std::string &tag, const Ontology &ont);

// ---------------------------------------------------------------------------
// Mission and plans

struct Mission {
    Graph graph;
    Ontology ontology;
    std::vector<Agent> agents;
    std::vector<Constraint> constraints;

    const Agent *find_agent(const std::string &name) const;
    // Declaration index, or -1.
    int agent_index(const std::string &name) const;

    bool operator==(const Mission &) const = default;
};

// Per-agent trajectories over the closed interval [0, horizon]. All agents
// share the horizon; agents that finish early wait in place.
struct Plan {
    int horizon = 0;
    std::map<std::string, std::vector<Location>> traj;

    const std::vector<Location> *traj_of(const std::string &agent) const;

    bool operator==(const Plan &) const = default;
};

}  // namespace ortac
