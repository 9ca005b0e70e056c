#include "ortacplus/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace ortac {

EdgeId normalize_edge(NodeId u, NodeId v) {
    if (u == v)
        throw InvalidEdgeError("self-loop edge (" + std::to_string(u.value) + ", " +
                               std::to_string(v.value) + ")");
    if (v < u) std::swap(u, v);
    return EdgeId{u, v};
}

std::string to_string(const NodeId &n) { return std::to_string(n.value); }

std::string to_string(const EdgeId &e) {
    return "(" + std::to_string(e.a.value) + ", " + std::to_string(e.b.value) + ")";
}

std::string to_string(const Location &l) {
    if (is_node(l)) return "node " + to_string(std::get<NodeId>(l));
    return "edge " + to_string(std::get<EdgeId>(l));
}

std::string to_string(const AttrValue &v) {
    struct Visitor {
        std::string operator()(double d) const {
            // Integral values print without a decimal point; everything else
            // uses the shortest form that parses back exactly.
            if (d == std::floor(d) && std::abs(d) < 9007199254740992.0 &&
                !std::signbit(d)) {
                return std::to_string(static_cast<long long>(d));
            }
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, d);
            return std::string(buf, res.ptr);
        }
        std::string operator()(const std::string &s) const {
            std::string out = "\"";
            for (char c : s) {
                if (c == '"' || c == '\\') out.push_back('\\');
                out.push_back(c);
            }
            out.push_back('"');
            return out;
        }
        std::string operator()(const TagValue &t) const { return t.name; }
    };
    return std::visit(Visitor{}, v);
}

const char *to_string(CompareOp op) {
    switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEq: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::Eq: return "==";
    case CompareOp::NotEq: return "!=";
    }
    return "?";
}

FilterPtr FilterNode::compare(std::string attr, CompareOp op, AttrValue lit) {
    auto n = std::make_shared<FilterNode>();
    n->kind = Kind::Compare;
    n->attr = std::move(attr);
    n->op = op;
    n->literal = std::move(lit);
    return n;
}

FilterPtr FilterNode::tag_atom(std::string tag) {
    auto n = std::make_shared<FilterNode>();
    n->kind = Kind::Tag;
    n->tag = std::move(tag);
    return n;
}

FilterPtr FilterNode::negate(FilterPtr child) {
    auto n = std::make_shared<FilterNode>();
    n->kind = Kind::Not;
    n->children.push_back(std::move(child));
    return n;
}

FilterPtr FilterNode::conj(std::vector<FilterPtr> children) {
    auto n = std::make_shared<FilterNode>();
    n->kind = Kind::And;
    n->children = std::move(children);
    return n;
}

FilterPtr FilterNode::disj(std::vector<FilterPtr> children) {
    auto n = std::make_shared<FilterNode>();
    n->kind = Kind::Or;
    n->children = std::move(children);
    return n;
}

bool filter_equal(const FilterPtr &a, const FilterPtr &b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case FilterNode::Kind::Compare:
        return a->attr == b->attr && a->op == b->op && a->literal == b->literal;
    case FilterNode::Kind::Tag:
        return a->tag == b->tag;
    default:
        if (a->children.size() != b->children.size()) return false;
        for (size_t i = 0; i < a->children.size(); ++i)
            if (!filter_equal(a->children[i], b->children[i])) return false;
        return true;
    }
}

namespace {

// Precedence: or < and < not < atom.
int filter_precedence(FilterNode::Kind k) {
    switch (k) {
    case FilterNode::Kind::Or: return 0;
    case FilterNode::Kind::And: return 1;
    case FilterNode::Kind::Not: return 2;
    default: return 3;
    }
}

void print_filter(const FilterPtr &f, int parent_prec, std::string &out) {
    int prec = filter_precedence(f->kind);
    bool parens = prec < parent_prec;
    if (parens) out.push_back('(');
    switch (f->kind) {
    case FilterNode::Kind::Compare:
        out += f->attr;
        out.push_back(' ');
        out += to_string(f->op);
        out.push_back(' ');
        out += to_string(f->literal);
        break;
    case FilterNode::Kind::Tag:
        out += f->tag;
        break;
    case FilterNode::Kind::Not:
        out += "not ";
        print_filter(f->children[0], prec + 1, out);
        break;
    case FilterNode::Kind::And:
    case FilterNode::Kind::Or: {
        const char *sep = f->kind == FilterNode::Kind::And ? " and " : " or ";
        for (size_t i = 0; i < f->children.size(); ++i) {
            if (i) out += sep;
            print_filter(f->children[i], prec + 1, out);
        }
        break;
    }
    }
    if (parens) out.push_back(')');
}

std::string agent_list(const std::vector<std::string> &agents) {
    std::string out = "[";
    for (size_t i = 0; i < agents.size(); ++i) {
        if (i) out += ", ";
        out += agents[i];
    }
    out.push_back(']');
    return out;
}

}  // namespace

std::string filter_to_string(const FilterPtr &f) {
    std::string out;
    print_filter(f, 0, out);
    return out;
}

std::string to_string(const GroundConstraint &c) {
    struct Visitor {
        std::string operator()(const GroundNodeGoal &g) const {
            return "node_goal(" + to_string(g.node) + ", " + agent_list(g.agents) + ")";
        }
        std::string operator()(const GroundNodeVisit &g) const {
            return "node_visit(" + to_string(g.node) + ", " + agent_list(g.agents) + ")";
        }
        std::string operator()(const GroundEdgeVisit &g) const {
            return "edge_visit(" + to_string(g.edge) + ", " + agent_list(g.agents) + ")";
        }
        std::string operator()(const GroundNodeAvoid &g) const {
            return "node_avoid(" + to_string(g.node) + ", " + agent_list(g.agents) + ")";
        }
        std::string operator()(const GroundEdgeAvoid &g) const {
            return "edge_avoid(" + to_string(g.edge) + ", " + agent_list(g.agents) + ")";
        }
        std::string operator()(const GroundNodeSupportedFrom &g) const {
            return "node_supported_from(" + to_string(g.node) + ", " + to_string(g.from) +
                   ")";
        }
        std::string operator()(const GroundSupport &g) const {
            return "support(" + g.unit1 + ", " + to_string(g.node1) + ", " + g.unit2 +
                   ", " + to_string(g.node2) + ")";
        }
    };
    return std::visit(Visitor{}, c);
}

// ---------------------------------------------------------------------------
// Graph

void Graph::add_node(NodeId n) { nodes_.insert(n); }

void Graph::add_edge(EdgeId e) {
    EdgeId canon = normalize_edge(e.a, e.b);
    if (!has_node(canon.a) || !has_node(canon.b))
        throw UnknownLocationError("edge " + to_string(canon) +
                                   " references an undeclared node");
    edges_.insert(canon);
}

bool Graph::has_node(NodeId n) const { return nodes_.count(n) > 0; }

bool Graph::has_edge(EdgeId e) const { return edges_.count(e) > 0; }

bool Graph::has(const Location &l) const {
    if (is_node(l)) return has_node(std::get<NodeId>(l));
    return has_edge(std::get<EdgeId>(l));
}

int Graph::capacity(const Location &l) const {
    if (!has(l)) throw UnknownLocationError("undeclared " + to_string(l));
    auto it = capacity_.find(l);
    return it == capacity_.end() ? 1 : it->second;
}

void Graph::set_capacity(const Location &l, int cap) {
    if (!has(l)) throw UnknownLocationError("undeclared " + to_string(l));
    if (cap < 1) throw ModelError("capacity must be positive");
    if (cap == 1)
        capacity_.erase(l);
    else
        capacity_[l] = cap;
}

const AttrMap &Graph::attrs(const Location &l) const {
    static const AttrMap empty;
    auto it = attrs_.find(l);
    return it == attrs_.end() ? empty : it->second;
}

void Graph::set_attr(const Location &l, const std::string &name, AttrValue value) {
    if (!has(l)) throw UnknownLocationError("undeclared " + to_string(l));
    attrs_[l][name] = std::move(value);
}

std::vector<Location> successors(const Location &loc, const Graph &g) {
    if (!g.has(loc)) throw UnknownLocationError("undeclared " + to_string(loc));
    std::vector<Location> out;
    if (is_node(loc)) {
        NodeId n = std::get<NodeId>(loc);
        out.push_back(loc);
        for (const EdgeId &e : g.edges())
            if (e.a == n || e.b == n) out.push_back(e);
    } else {
        EdgeId e = std::get<EdgeId>(loc);
        out.push_back(e.a);
        out.push_back(e.b);
        out.push_back(loc);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Ontology

void Ontology::add_root(const std::string &tag) { tags_.insert(tag); }

void Ontology::add_child(const std::string &parent, const std::string &child) {
    tags_.insert(parent);
    tags_.insert(child);
    auto it = parent_.find(child);
    if (it != parent_.end()) {
        if (it->second != parent)
            throw ModelError("tag '" + child + "' already has parent '" + it->second +
                             "'");
        return;
    }
    // Walking up from `parent` must not reach `child`, else we form a cycle.
    if (descendant_or_equal(parent, child))
        throw ModelError("tag '" + child + "' cannot become a child of its descendant '" +
                         parent + "'");
    parent_[child] = parent;
}

bool Ontology::contains(const std::string &tag) const { return tags_.count(tag) > 0; }

bool Ontology::descendant_or_equal(const std::string &sub, const std::string &tag) const {
    std::string cur = sub;
    // The parent relation is acyclic by construction; the guard bounds the
    // walk anyway.
    for (size_t steps = 0; steps <= parent_.size(); ++steps) {
        if (cur == tag) return true;
        auto it = parent_.find(cur);
        if (it == parent_.end()) return false;
        cur = it->second;
    }
    return false;
}

std::optional<std::string> Ontology::parent_of(const std::string &tag) const {
    auto it = parent_.find(tag);
    if (it == parent_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Ontology::roots() const {
    std::vector<std::string> out;
    for (const auto &t : tags_)
        if (!parent_.count(t)) out.push_back(t);
    return out;
}

std::vector<std::string> Ontology::children_of(const std::string &tag) const {
    std::vector<std::string> out;
    for (const auto &[child, parent] : parent_)
        if (parent == tag) out.push_back(child);
    return out;
}

bool matches(const Agent &agent, const std::string &tag, const Ontology &ont) {
    if (!ont.contains(tag)) throw UnknownTagError("unknown tag '" + tag + "'");
    for (const auto &[name, value] : agent.attrs) {
        const auto *tv = std::get_if<TagValue>(&value);
        if (tv && ont.descendant_or_equal(tv->name, tag)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Mission / Plan

const Agent *Mission::find_agent(const std::string &name) const {
    for (const Agent &a : agents)
        if (a.name == name) return &a;
    return nullptr;
}

int Mission::agent_index(const std::string &name) const {
    for (size_t i = 0; i < agents.size(); ++i)
        if (agents[i].name == name) return static_cast<int>(i);
    return -1;
}

const std::vector<Location> *Plan::traj_of(const std::string &agent) const {
    auto it = traj.find(agent);
    if (it == traj.end()) return nullptr;
    return &it->second;
}

}  // namespace ortac
