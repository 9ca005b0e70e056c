#include <doctest.h>

#include <algorithm>

#include "generators.hpp"
#include "ortacplus/analysis.hpp"
#include "ortacplus/parser.hpp"
#include "test_support.hpp"

using namespace ortac;
using namespace ortac::analysis;
using test_support::ground_fixture;
using test_support::parse_fixture;

namespace {

bool has_code(const std::vector<StaticDiagnostic> &diags, StaticCode code) {
    return std::any_of(diags.begin(), diags.end(),
                       [&](const StaticDiagnostic &d) { return d.code == code; });
}

// Two wheeled/tracked UGVs and one UAV.
Mission fleet_mission() {
    Mission m;
    for (int i = 1; i <= 3; ++i) m.graph.add_node(NodeId{i});
    m.graph.add_node(NodeId{14});
    m.graph.add_edge(EdgeId{NodeId{1}, NodeId{2}});
    m.graph.add_edge(EdgeId{NodeId{2}, NodeId{14}});
    m.ontology.add_child("UGV", "wheeled");
    m.ontology.add_child("UGV", "tracked");
    m.ontology.add_root("UAV");
    m.agents.push_back({"agent1", Location{NodeId{1}}, {{"drive", TagValue{"wheeled"}}}});
    m.agents.push_back({"agent2", Location{NodeId{2}}, {{"drive", TagValue{"tracked"}}}});
    m.agents.push_back({"agent3", Location{NodeId{3}}, {{"drive", TagValue{"UAV"}}}});
    return m;
}

}  // namespace

TEST_CASE("tag queries resolve through the ontology") {
    Mission m = fleet_mission();
    std::vector<StaticDiagnostic> diags;
    CHECK(resolve_agent_selector(TagQuery{"UGV"}, m, diags) ==
          std::vector<std::string>{"agent1", "agent2"});
    CHECK(diags.empty());

    CHECK(resolve_agent_selector(ExplicitAgents{{"agent1"}}, m, diags) ==
          std::vector<std::string>{"agent1"});
    CHECK(diags.empty());

    resolve_agent_selector(TagQuery{"boat"}, m, diags);
    CHECK(has_code(diags, StaticCode::UnknownTag));
}

TEST_CASE("agent filters match direct evaluation") {
    Mission m = fleet_mission();
    m.agents[0].attrs["vehicle"] = std::string("VBCI");
    m.agents[2].attrs["vehicle"] = std::string("drone");

    parser::FilterParseResult f = parser::parse_filter("vehicle == \"VBCI\"");
    REQUIRE(f.root != nullptr);
    std::vector<StaticDiagnostic> diags;
    std::vector<std::string> resolved =
        resolve_agent_selector(FilterExpr{f.root}, m, diags);

    // Oracle: evaluate the comparison over each agent's attribute map.
    std::vector<std::string> expected;
    for (const Agent &a : m.agents) {
        auto it = a.attrs.find("vehicle");
        if (it != a.attrs.end() && it->second == AttrValue{std::string("VBCI")})
            expected.push_back(a.name);
    }
    CHECK(resolved == expected);
    CHECK(resolved == std::vector<std::string>{"agent1"});
}

TEST_CASE("declaration order and dedup of explicit agent lists") {
    Mission m = fleet_mission();
    std::vector<StaticDiagnostic> diags;
    CHECK(resolve_agent_selector(ExplicitAgents{{"agent2", "agent1", "agent2"}}, m, diags) ==
          std::vector<std::string>{"agent1", "agent2"});
    CHECK(diags.empty());
}

TEST_CASE("location filters evaluate attribute maps") {
    Mission m;
    for (int i = 1; i <= 4; ++i) m.graph.add_node(NodeId{i});
    EdgeId e1{NodeId{1}, NodeId{2}}, e2{NodeId{2}, NodeId{3}}, e3{NodeId{3}, NodeId{4}};
    m.graph.add_edge(e1);
    m.graph.add_edge(e2);
    m.graph.add_edge(e3);
    m.graph.set_attr(Location{e1}, "width", 8.0);
    m.graph.set_attr(Location{e2}, "width", 12.0);

    parser::FilterParseResult f = parser::parse_filter("width < 10");
    REQUIRE(f.root != nullptr);

    std::vector<StaticDiagnostic> diags;
    std::vector<Location> resolved =
        resolve_location_selector(FilterExpr{f.root}, m, LocationKind::Edge, diags);
    CHECK(resolved == std::vector<Location>{e1});
    // e3 has no width: it does not match, warned once per attribute name.
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].severity == Severity::Warning);
    CHECK(diags[0].code == StaticCode::MissingAttribute);

    std::vector<StaticDiagnostic> diags2;
    CHECK(resolve_location_selector(ExplicitNodes{{NodeId{4}}}, m, LocationKind::Node,
                                    diags2) == std::vector<Location>{NodeId{4}});
    CHECK(diags2.empty());
}

TEST_CASE("tag queries also select locations by tag attribute") {
    Mission m;
    for (int i = 1; i <= 3; ++i) m.graph.add_node(NodeId{i});
    m.graph.add_edge(EdgeId{NodeId{1}, NodeId{2}});
    m.ontology.add_child("road", "highway");
    m.graph.set_attr(Location{NodeId{2}}, "kind", TagValue{"highway"});

    std::vector<StaticDiagnostic> diags;
    CHECK(resolve_location_selector(TagQuery{"road"}, m, LocationKind::Node, diags) ==
          std::vector<Location>{NodeId{2}});
    CHECK(diags.empty());
}

TEST_CASE("filters that match nothing are empty-selector errors") {
    Mission m;
    m.graph.add_node(NodeId{1});
    m.graph.add_node(NodeId{2});
    m.graph.add_edge(EdgeId{NodeId{1}, NodeId{2}});
    parser::FilterParseResult f = parser::parse_filter("width < 10");
    std::vector<StaticDiagnostic> diags;
    std::vector<Location> resolved =
        resolve_location_selector(FilterExpr{f.root}, m, LocationKind::Edge, diags);
    CHECK(resolved.empty());
    CHECK(has_code(diags, StaticCode::EmptySelector));
}

TEST_CASE("numeric comparison on a non-numeric attribute is a hard error") {
    Mission m = fleet_mission();
    m.agents[0].attrs["width"] = std::string("wide");
    parser::FilterParseResult f = parser::parse_filter("width < 10");
    std::vector<StaticDiagnostic> diags;
    resolve_agent_selector(FilterExpr{f.root}, m, diags);
    CHECK(has_code(diags, StaticCode::TypeMismatchInFilter));
}

TEST_CASE("and_expand distributes the first list argument") {
    Mission m = fleet_mission();
    for (int i : {11, 14}) {
        if (!m.graph.has_node(NodeId{i})) m.graph.add_node(NodeId{i});
    }
    m.agents.push_back({"c1", Location{NodeId{3}}, {}});
    m.agents.push_back({"c2", Location{NodeId{14}}, {}});

    std::vector<StaticDiagnostic> diags;
    Constraint c = NodeGoal{ExplicitNodes{{NodeId{11}, NodeId{14}}},
                            ExplicitAgents{{"c1", "c2"}}};
    std::vector<GroundConstraint> ground = and_expand(c, m, diags);
    CHECK(diags.empty());
    REQUIRE(ground.size() == 2);
    CHECK(ground[0] == GroundConstraint{GroundNodeGoal{NodeId{11}, {"c1", "c2"}}});
    CHECK(ground[1] == GroundConstraint{GroundNodeGoal{NodeId{14}, {"c1", "c2"}}});

    // Singleton sugar: one location, one agent.
    std::vector<StaticDiagnostic> diags2;
    Constraint sugar = NodeGoal{ExplicitNodes{{NodeId{14}}}, ExplicitAgents{{"agent1"}}};
    std::vector<GroundConstraint> single = and_expand(sugar, m, diags2);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == GroundConstraint{GroundNodeGoal{NodeId{14}, {"agent1"}}});

    // Empty first list: rejected loudly.
    std::vector<StaticDiagnostic> diags3;
    Constraint empty = NodeAvoid{ExplicitNodes{{}}, ExplicitAgents{{"agent1"}}};
    CHECK(and_expand(empty, m, diags3).empty());
    CHECK(has_code(diags3, StaticCode::EmptySelector));
}

TEST_CASE("check_static accepts the goma fixture") {
    Mission m = parse_fixture("goma.ortac");
    CheckResult r = check_static(m);
    REQUIRE(r.ok());
    CHECK(r.ground->ground.size() == 5);
    CHECK_FALSE(has_code(r.diagnostics, StaticCode::GoalUnreachableStatic));

    // Four companies share node 9 only because its capacity was raised.
    m.graph.set_capacity(Location{NodeId{9}}, 1);
    CheckResult tight = check_static(m);
    CHECK_FALSE(tight.ok());
    CHECK(has_code(tight.diagnostics, StaticCode::InitCapacityExceeded));
}

TEST_CASE("undeclared init locations surface as UnknownLocation") {
    parser::ParseResult r =
        parser::parse_mission("graph { nodes {1..3} } agent u1 { init: 99 }");
    REQUIRE(r.ok());
    CheckResult checked = check_static(*r.mission);
    CHECK_FALSE(checked.ok());
    CHECK(has_code(checked.diagnostics, StaticCode::UnknownLocation));
}

TEST_CASE("goals made unreachable by avoids warn statically") {
    Mission m;
    for (int i = 1; i <= 3; ++i) m.graph.add_node(NodeId{i});
    m.graph.add_edge(EdgeId{NodeId{1}, NodeId{2}});
    m.graph.add_edge(EdgeId{NodeId{2}, NodeId{3}});
    m.agents.push_back({"u", Location{NodeId{1}}, {}});
    m.constraints.push_back(NodeGoal{ExplicitNodes{{NodeId{3}}}, ExplicitAgents{{"u"}}});
    m.constraints.push_back(NodeAvoid{ExplicitNodes{{NodeId{3}}}, ExplicitAgents{{"u"}}});

    CheckResult r = check_static(m);
    REQUIRE(r.ok());  // a warning, not an error
    CHECK(has_code(r.diagnostics, StaticCode::GoalUnreachableStatic));
}

TEST_CASE("resolution is independent of constraint order") {
    Mission m = fleet_mission();
    m.constraints.push_back(NodeGoal{ExplicitNodes{{NodeId{14}}}, TagQuery{"UGV"}});
    m.constraints.push_back(NodeVisit{ExplicitNodes{{NodeId{2}}}, TagQuery{"UAV"}});

    Mission swapped = m;
    std::swap(swapped.constraints[0], swapped.constraints[1]);

    CheckResult a = check_static(m);
    CheckResult b = check_static(swapped);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    REQUIRE(a.ground->ground.size() == 2);
    REQUIRE(b.ground->ground.size() == 2);
    CHECK(a.ground->ground[0] == b.ground->ground[1]);
    CHECK(a.ground->ground[1] == b.ground->ground[0]);
}

TEST_CASE("enlarging the ontology downward never shrinks a tag query") {
    Mission m = fleet_mission();
    std::vector<StaticDiagnostic> diags;
    std::vector<std::string> before = resolve_agent_selector(TagQuery{"UGV"}, m, diags);

    m.ontology.add_child("wheeled", "VBCI");
    m.agents.push_back({"agent4", Location{NodeId{14}}, {{"drive", TagValue{"VBCI"}}}});
    std::vector<std::string> after = resolve_agent_selector(TagQuery{"UGV"}, m, diags);
    for (const std::string &name : before)
        CHECK(std::find(after.begin(), after.end(), name) != after.end());
    CHECK(after.size() == before.size() + 1);
}

TEST_CASE("check_static is idempotent on ground missions") {
    for (unsigned seed : {1u, 7u, 21u}) {
        CAPTURE(seed);
        Mission m = test_support::random_oracle_instance(seed);
        CheckResult first = check_static(m);
        REQUIRE(first.ok());

        // Rebuild a mission whose constraints are already ground.
        Mission ground_form = m;
        ground_form.constraints.clear();
        for (const GroundConstraint &gc : first.ground->ground) {
            if (const auto *g = std::get_if<GroundNodeGoal>(&gc))
                ground_form.constraints.push_back(
                    NodeGoal{ExplicitNodes{{g->node}}, ExplicitAgents{g->agents}});
            else if (const auto *v = std::get_if<GroundNodeVisit>(&gc))
                ground_form.constraints.push_back(
                    NodeVisit{ExplicitNodes{{v->node}}, ExplicitAgents{v->agents}});
            else if (const auto *ev = std::get_if<GroundEdgeVisit>(&gc))
                ground_form.constraints.push_back(
                    EdgeVisit{ExplicitEdges{{ev->edge}}, ExplicitAgents{ev->agents}});
            else if (const auto *na = std::get_if<GroundNodeAvoid>(&gc))
                ground_form.constraints.push_back(
                    NodeAvoid{ExplicitNodes{{na->node}}, ExplicitAgents{na->agents}});
            else if (const auto *ea = std::get_if<GroundEdgeAvoid>(&gc))
                ground_form.constraints.push_back(
                    EdgeAvoid{ExplicitEdges{{ea->edge}}, ExplicitAgents{ea->agents}});
            else if (const auto *sf = std::get_if<GroundNodeSupportedFrom>(&gc))
                ground_form.constraints.push_back(
                    NodeSupportedFrom{ExplicitNodes{{sf->node}}, sf->from});
            else if (const auto *s = std::get_if<GroundSupport>(&gc))
                ground_form.constraints.push_back(
                    Support{s->unit1, s->node1, s->unit2, s->node2});
        }
        CheckResult second = check_static(ground_form);
        REQUIRE(second.ok());
        CHECK(second.ground->ground == first.ground->ground);
    }
}

TEST_CASE("the ontology3 fixture resolves as documented") {
    Mission m = parse_fixture("ontology3.ortac");
    std::vector<StaticDiagnostic> diags;
    CHECK(resolve_agent_selector(TagQuery{"UGV"}, m, diags) ==
          std::vector<std::string>{"agent1", "agent2"});

    GroundMission gm = ground_fixture("ontology3.ortac");
    std::vector<EdgeId> avoided;
    for (const GroundConstraint &gc : gm.ground)
        if (const auto *ea = std::get_if<GroundEdgeAvoid>(&gc)) avoided.push_back(ea->edge);
    CHECK(avoided == std::vector<EdgeId>{EdgeId{NodeId{1}, NodeId{2}},
                                         EdgeId{NodeId{2}, NodeId{14}}});
}
