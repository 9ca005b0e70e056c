#include "ortacplus/analysis.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace ortac::analysis {

const char *to_string(StaticCode code) {
    switch (code) {
    case StaticCode::UnknownLocation: return "UnknownLocation";
    case StaticCode::UnknownAgent: return "UnknownAgent";
    case StaticCode::UnknownTag: return "UnknownTag";
    case StaticCode::EmptySelector: return "EmptySelector";
    case StaticCode::InitCapacityExceeded: return "InitCapacityExceeded";
    case StaticCode::TypeMismatchInFilter: return "TypeMismatchInFilter";
    case StaticCode::GoalUnreachableStatic: return "GoalUnreachableStatic";
    case StaticCode::MissingAttribute: return "MissingAttribute";
    }
    return "?";
}

int GroundMission::agent_index(const std::string &name) const {
    for (size_t i = 0; i < agents.size(); ++i)
        if (agents[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

void emit(std::vector<StaticDiagnostic> &diags, Severity sev, StaticCode code,
          std::string msg) {
    diags.push_back({sev, code, std::move(msg)});
}

// Evaluates a filter expression against one attribute map. Missing attributes
// make their comparison false (warned once per attribute name); type
// mismatches are hard errors.
class FilterEvaluator {
public:
    FilterEvaluator(const Ontology &ont, std::vector<StaticDiagnostic> &diags)
        : ont_(ont), diags_(diags) {}

    bool failed() const { return failed_; }

    bool eval(const FilterPtr &f, const AttrMap &attrs) {
        switch (f->kind) {
        case FilterNode::Kind::Compare:
            return eval_compare(*f, attrs);
        case FilterNode::Kind::Tag: {
            if (!ont_.contains(f->tag)) {
                fail(StaticCode::UnknownTag, "unknown tag '" + f->tag + "' in filter");
                return false;
            }
            for (const auto &[name, value] : attrs) {
                const auto *tv = std::get_if<TagValue>(&value);
                if (tv && ont_.descendant_or_equal(tv->name, f->tag)) return true;
            }
            return false;
        }
        case FilterNode::Kind::Not:
            return !eval(f->children[0], attrs);
        case FilterNode::Kind::And:
            for (const auto &c : f->children)
                if (!eval(c, attrs)) return false;
            return true;
        case FilterNode::Kind::Or:
            for (const auto &c : f->children)
                if (eval(c, attrs)) return true;
            return false;
        }
        return false;
    }

private:
    const Ontology &ont_;
    std::vector<StaticDiagnostic> &diags_;
    std::set<std::string> warned_missing_;
    std::set<std::string> reported_;
    bool failed_ = false;

    void fail(StaticCode code, const std::string &msg) {
        failed_ = true;
        if (reported_.insert(msg).second) emit(diags_, Severity::Error, code, msg);
    }

    bool eval_compare(const FilterNode &f, const AttrMap &attrs) {
        auto it = attrs.find(f.attr);
        if (it == attrs.end()) {
            if (warned_missing_.insert(f.attr).second)
                emit(diags_, Severity::Warning, StaticCode::MissingAttribute,
                     "attribute '" + f.attr + "' is missing on some objects; they do not match");
            return false;
        }
        const AttrValue &value = it->second;
        bool numeric_op = f.op != CompareOp::Eq && f.op != CompareOp::NotEq;
        const double *lhs_num = std::get_if<double>(&value);
        const double *rhs_num = std::get_if<double>(&f.literal);
        if (numeric_op) {
            if (!lhs_num || !rhs_num) {
                fail(StaticCode::TypeMismatchInFilter,
                     "numeric comparison '" + f.attr + " " + to_string(f.op) +
                         " ...' applied to a non-numeric value");
                return false;
            }
            switch (f.op) {
            case CompareOp::Less: return *lhs_num < *rhs_num;
            case CompareOp::LessEq: return *lhs_num <= *rhs_num;
            case CompareOp::Greater: return *lhs_num > *rhs_num;
            case CompareOp::GreaterEq: return *lhs_num >= *rhs_num;
            default: return false;
            }
        }
        // Equality: numbers compare numerically; text and tags compare by
        // content (no ontology walk, use a tag atom for that).
        bool equal;
        if (lhs_num || rhs_num) {
            if (!lhs_num || !rhs_num) {
                fail(StaticCode::TypeMismatchInFilter,
                     "equality on '" + f.attr + "' mixes a number with a non-number");
                return false;
            }
            equal = *lhs_num == *rhs_num;
        } else {
            auto symbolic = [](const AttrValue &v) -> const std::string & {
                if (const auto *s = std::get_if<std::string>(&v)) return *s;
                return std::get<TagValue>(v).name;
            };
            equal = symbolic(value) == symbolic(f.literal);
        }
        return f.op == CompareOp::Eq ? equal : !equal;
    }
};

std::vector<Location> locations_of_kind(const Graph &g, LocationKind kind) {
    std::vector<Location> out;
    if (kind == LocationKind::Node)
        for (const NodeId &n : g.nodes()) out.push_back(n);
    else
        for (const EdgeId &e : g.edges()) out.push_back(e);
    return out;
}

}  // namespace

std::vector<std::string> resolve_agent_selector(const Selector &sel, const Mission &m,
                                                std::vector<StaticDiagnostic> &diags) {
    size_t before = diags.size();
    std::set<std::string> picked;

    if (const auto *ex = std::get_if<ExplicitAgents>(&sel)) {
        for (const std::string &name : ex->names) {
            if (m.agent_index(name) < 0)
                emit(diags, Severity::Error, StaticCode::UnknownAgent,
                     "unknown agent '" + name + "'");
            else
                picked.insert(name);
        }
    } else if (const auto *tq = std::get_if<TagQuery>(&sel)) {
        if (!m.ontology.contains(tq->tag)) {
            emit(diags, Severity::Error, StaticCode::UnknownTag,
                 "unknown tag '" + tq->tag + "'");
        } else {
            for (const Agent &a : m.agents)
                if (matches(a, tq->tag, m.ontology)) picked.insert(a.name);
        }
    } else if (const auto *fe = std::get_if<FilterExpr>(&sel)) {
        FilterEvaluator ev(m.ontology, diags);
        for (const Agent &a : m.agents)
            if (ev.eval(fe->root, a.attrs)) picked.insert(a.name);
        if (ev.failed()) return {};
    } else {
        emit(diags, Severity::Error, StaticCode::UnknownAgent,
             "expected an agent selector");
        return {};
    }

    bool had_error = std::any_of(diags.begin() + before, diags.end(),
                                 [](const StaticDiagnostic &d) {
                                     return d.severity == Severity::Error;
                                 });
    if (had_error) return {};
    if (picked.empty()) {
        emit(diags, Severity::Error, StaticCode::EmptySelector,
             "agent selector matches no agents");
        return {};
    }
    // Declaration order.
    std::vector<std::string> out;
    for (const Agent &a : m.agents)
        if (picked.count(a.name)) out.push_back(a.name);
    return out;
}

std::vector<Location> resolve_location_selector(const Selector &sel, const Mission &m,
                                                LocationKind kind,
                                                std::vector<StaticDiagnostic> &diags) {
    size_t before = diags.size();
    std::vector<Location> out;
    auto push_unique = [&](const Location &l) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    };

    if (const auto *en = std::get_if<ExplicitNodes>(&sel)) {
        if (kind != LocationKind::Node) {
            emit(diags, Severity::Error, StaticCode::UnknownLocation,
                 "expected edges, got a node list");
            return {};
        }
        for (const NodeId &n : en->nodes) {
            if (!m.graph.has_node(n))
                emit(diags, Severity::Error, StaticCode::UnknownLocation,
                     "unknown node " + to_string(n));
            else
                push_unique(n);
        }
    } else if (const auto *ee = std::get_if<ExplicitEdges>(&sel)) {
        if (kind != LocationKind::Edge) {
            emit(diags, Severity::Error, StaticCode::UnknownLocation,
                 "expected nodes, got an edge list");
            return {};
        }
        for (const EdgeId &e : ee->edges) {
            if (!m.graph.has_edge(e))
                emit(diags, Severity::Error, StaticCode::UnknownLocation,
                     "unknown edge " + to_string(e));
            else
                push_unique(e);
        }
    } else if (const auto *tq = std::get_if<TagQuery>(&sel)) {
        if (!m.ontology.contains(tq->tag)) {
            emit(diags, Severity::Error, StaticCode::UnknownTag,
                 "unknown tag '" + tq->tag + "'");
            return {};
        }
        for (const Location &l : locations_of_kind(m.graph, kind)) {
            for (const auto &[name, value] : m.graph.attrs(l)) {
                const auto *tv = std::get_if<TagValue>(&value);
                if (tv && m.ontology.descendant_or_equal(tv->name, tq->tag)) {
                    out.push_back(l);
                    break;
                }
            }
        }
    } else if (const auto *fe = std::get_if<FilterExpr>(&sel)) {
        FilterEvaluator ev(m.ontology, diags);
        for (const Location &l : locations_of_kind(m.graph, kind))
            if (ev.eval(fe->root, m.graph.attrs(l))) out.push_back(l);
        if (ev.failed()) return {};
    } else {
        emit(diags, Severity::Error, StaticCode::UnknownLocation,
             "expected a location selector");
        return {};
    }

    bool had_error = std::any_of(diags.begin() + before, diags.end(),
                                 [](const StaticDiagnostic &d) {
                                     return d.severity == Severity::Error;
                                 });
    if (had_error) return {};
    if (out.empty()) {
        emit(diags, Severity::Error, StaticCode::EmptySelector,
             "location selector matches no locations");
        return {};
    }
    return out;
}

namespace {

bool node_declared(const Mission &m, NodeId n, std::vector<StaticDiagnostic> &diags,
                   const char *what) {
    if (m.graph.has_node(n)) return true;
    emit(diags, Severity::Error, StaticCode::UnknownLocation,
         std::string(what) + ": unknown node " + to_string(n));
    return false;
}

bool agent_declared(const Mission &m, const std::string &name,
                    std::vector<StaticDiagnostic> &diags) {
    if (m.agent_index(name) >= 0) return true;
    emit(diags, Severity::Error, StaticCode::UnknownAgent, "unknown agent '" + name + "'");
    return false;
}

}  // namespace

std::vector<GroundConstraint> and_expand(const Constraint &c, const Mission &m,
                                         std::vector<StaticDiagnostic> &diags) {
    size_t before = diags.size();
    std::vector<GroundConstraint> out;

    auto expand_pair = [&](const Selector &locs, const Selector &agents, LocationKind kind,
                           auto make) {
        std::vector<Location> ls = resolve_location_selector(locs, m, kind, diags);
        std::vector<std::string> as = resolve_agent_selector(agents, m, diags);
        bool had_error = std::any_of(
            diags.begin() + before, diags.end(),
            [](const StaticDiagnostic &d) { return d.severity == Severity::Error; });
        if (had_error) return;
        for (const Location &l : ls) out.push_back(make(l, as));
    };

    struct Visitor {
        const Mission &m;
        std::vector<StaticDiagnostic> &diags;
        std::vector<GroundConstraint> &out;
        decltype(expand_pair) &pair;

        void operator()(const NodeGoal &x) {
            pair(x.nodes, x.agents, LocationKind::Node,
                 [](const Location &l, const std::vector<std::string> &as) {
                     return GroundConstraint{GroundNodeGoal{std::get<NodeId>(l), as}};
                 });
        }
        void operator()(const NodeVisit &x) {
            pair(x.nodes, x.agents, LocationKind::Node,
                 [](const Location &l, const std::vector<std::string> &as) {
                     return GroundConstraint{GroundNodeVisit{std::get<NodeId>(l), as}};
                 });
        }
        void operator()(const EdgeVisit &x) {
            pair(x.edges, x.agents, LocationKind::Edge,
                 [](const Location &l, const std::vector<std::string> &as) {
                     return GroundConstraint{GroundEdgeVisit{std::get<EdgeId>(l), as}};
                 });
        }
        void operator()(const NodeAvoid &x) {
            pair(x.nodes, x.agents, LocationKind::Node,
                 [](const Location &l, const std::vector<std::string> &as) {
                     return GroundConstraint{GroundNodeAvoid{std::get<NodeId>(l), as}};
                 });
        }
        void operator()(const EdgeAvoid &x) {
            pair(x.edges, x.agents, LocationKind::Edge,
                 [](const Location &l, const std::vector<std::string> &as) {
                     return GroundConstraint{GroundEdgeAvoid{std::get<EdgeId>(l), as}};
                 });
        }
        void operator()(const NodeSupportedFrom &x) {
            std::vector<Location> ls =
                resolve_location_selector(x.nodes, m, LocationKind::Node, diags);
            bool ok = node_declared(m, x.from, diags, "node_supported_from");
            if (!ok || ls.empty()) return;
            for (const Location &l : ls)
                out.push_back(GroundNodeSupportedFrom{std::get<NodeId>(l), x.from});
        }
        void operator()(const Support &x) {
            bool ok = agent_declared(m, x.unit1, diags);
            ok = agent_declared(m, x.unit2, diags) && ok;
            ok = node_declared(m, x.node1, diags, "support") && ok;
            ok = node_declared(m, x.node2, diags, "support") && ok;
            if (ok) out.push_back(GroundSupport{x.unit1, x.node1, x.unit2, x.node2});
        }
    };

    Visitor v{m, diags, out, expand_pair};
    std::visit(v, c);

    bool had_error = std::any_of(
        diags.begin() + before, diags.end(),
        [](const StaticDiagnostic &d) { return d.severity == Severity::Error; });
    if (had_error) return {};
    return out;
}

namespace {

// BFS step distances over the successor graph with the agent's avoided
// locations removed; unreachable stays at -1.
std::map<Location, int> bfs_distances(const Graph &g, const Location &start,
                                      const std::set<Location> &avoid) {
    std::map<Location, int> dist;
    if (!g.has(start)) return dist;
    dist[start] = 0;
    std::deque<Location> queue{start};
    while (!queue.empty()) {
        Location cur = queue.front();
        queue.pop_front();
        int d = dist[cur];
        for (const Location &next : successors(cur, g)) {
            if (avoid.count(next) || dist.count(next)) continue;
            dist[next] = d + 1;
            queue.push_back(next);
        }
    }
    return dist;
}

}  // namespace

CheckResult check_static(const Mission &m) {
    CheckResult result;
    auto &diags = result.diagnostics;

    for (const Agent &a : m.agents) {
        if (!m.graph.has(a.init))
            emit(diags, Severity::Error, StaticCode::UnknownLocation,
                 "agent '" + a.name + "': init refers to undeclared " + to_string(a.init));
    }

    std::vector<GroundConstraint> ground;
    for (size_t i = 0; i < m.constraints.size(); ++i) {
        std::vector<StaticDiagnostic> local;
        std::vector<GroundConstraint> expanded = and_expand(m.constraints[i], m, local);
        for (StaticDiagnostic &d : local) {
            d.message = "constraint #" + std::to_string(i + 1) + ": " + d.message;
            diags.push_back(std::move(d));
        }
        for (GroundConstraint &g : expanded) ground.push_back(std::move(g));
    }

    // Initial positions must respect capacities.
    std::map<Location, int> occupancy;
    for (const Agent &a : m.agents)
        if (m.graph.has(a.init)) ++occupancy[a.init];
    for (const auto &[loc, count] : occupancy) {
        int cap = m.graph.capacity(loc);
        if (count > cap)
            emit(diags, Severity::Error, StaticCode::InitCapacityExceeded,
                 std::to_string(count) + " agents start at " + to_string(loc) +
                     " but its capacity is " + std::to_string(cap));
    }

    bool had_error = std::any_of(diags.begin(), diags.end(), [](const StaticDiagnostic &d) {
        return d.severity == Severity::Error;
    });
    if (had_error) return result;

    // Per-agent avoided locations, for the static reachability warning.
    std::map<std::string, std::set<Location>> avoided;
    for (const GroundConstraint &gc : ground) {
        if (const auto *na = std::get_if<GroundNodeAvoid>(&gc))
            for (const std::string &a : na->agents) avoided[a].insert(na->node);
        if (const auto *ea = std::get_if<GroundEdgeAvoid>(&gc))
            for (const std::string &a : ea->agents) avoided[a].insert(ea->edge);
    }
    for (const GroundConstraint &gc : ground) {
        const auto *goal = std::get_if<GroundNodeGoal>(&gc);
        if (!goal) continue;
        bool reachable = false;
        for (const std::string &name : goal->agents) {
            const Agent *a = m.find_agent(name);
            std::map<Location, int> dist = bfs_distances(m.graph, a->init, avoided[name]);
            if (dist.count(Location{goal->node})) {
                reachable = true;
                break;
            }
        }
        if (!reachable)
            emit(diags, Severity::Warning, StaticCode::GoalUnreachableStatic,
                 "goal node " + to_string(goal->node) +
                     " is unreachable for every candidate agent (ignoring other agents)");
    }

    result.ground = GroundMission{m.graph, m.agents, std::move(ground)};
    return result;
}

}  // namespace ortac::analysis
