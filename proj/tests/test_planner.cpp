#include <doctest.h>

#include <chrono>

#include "generators.hpp"
#include "ortacplus/planner.hpp"
#include "ortacplus/validator.hpp"
#include "test_support.hpp"

using namespace ortac;
using namespace ortac::planner;
using analysis::GroundMission;
using test_support::ground_fixture;

namespace {

GroundMission p3(std::vector<GroundConstraint> ground, std::vector<Agent> agents) {
    GroundMission gm;
    for (int i = 1; i <= 3; ++i) gm.graph.add_node(NodeId{i});
    gm.graph.add_edge(EdgeId{NodeId{1}, NodeId{2}});
    gm.graph.add_edge(EdgeId{NodeId{2}, NodeId{3}});
    gm.agents = std::move(agents);
    gm.ground = std::move(ground);
    return gm;
}

// Support semantics checked literally, independent of the validator.
void check_support_literally(const Plan &p, const GroundMission &gm) {
    for (const GroundConstraint &gc : gm.ground) {
        const auto *sf = std::get_if<GroundNodeSupportedFrom>(&gc);
        if (!sf) continue;
        for (int t = 0; t <= p.horizon; ++t) {
            for (const auto &[name, traj] : p.traj) {
                if (traj[t] != Location{sf->node}) continue;
                bool supported = false;
                for (const auto &[other, other_traj] : p.traj)
                    if (other != name && other_traj[t] == Location{sf->from})
                        supported = true;
                CHECK_MESSAGE(supported, name, " unsupported at t=", t);
            }
        }
    }
}

// Anonymous goals: for every ground goal some candidate stands on the node at T.
void check_anonymous_goals(const Plan &p, const GroundMission &gm) {
    for (const GroundConstraint &gc : gm.ground) {
        const auto *g = std::get_if<GroundNodeGoal>(&gc);
        if (!g) continue;
        bool hit = false;
        for (const std::string &a : g->agents)
            if (p.traj.at(a)[p.horizon] == Location{g->node}) hit = true;
        CHECK(hit);
    }
}

}  // namespace

TEST_CASE("lower_bound counts node/edge steps") {
    GroundMission gm = p3({GroundNodeGoal{NodeId{3}, {"a"}}},
                          {{"a", Location{NodeId{1}}, {}}});
    CHECK(lower_bound(gm) == 4);  // n1 e12 n2 e23 n3

    GroundMission at_goal = p3({GroundNodeGoal{NodeId{1}, {"a"}}},
                               {{"a", Location{NodeId{1}}, {}}});
    CHECK(lower_bound(at_goal) == 0);

    // Disconnected goal: sentinel one past the horizon cap.
    GroundMission cut = p3({GroundNodeGoal{NodeId{3}, {"a"}}},
                           {{"a", Location{NodeId{1}}, {}}});
    cut.graph = Graph{};
    for (int i = 1; i <= 3; ++i) cut.graph.add_node(NodeId{i});
    cut.graph.add_edge(EdgeId{NodeId{1}, NodeId{2}});
    CHECK(lower_bound(cut) == 65);
    CHECK(lower_bound(cut, 10) == 11);
}

TEST_CASE("single agent walks the path optimally") {
    GroundMission gm = p3({GroundNodeGoal{NodeId{3}, {"a"}}},
                          {{"a", Location{NodeId{1}}, {}}});
    PlanOutcome got = plan(gm, {});
    REQUIRE(std::holds_alternative<Solved>(got));
    const Plan &p = std::get<Solved>(got).plan;
    CHECK(p.horizon == 4);
    CHECK(validator::validate(p, gm).empty());

    PlanOutcome oracle = brute_force_plan(gm, 8);
    REQUIRE(std::holds_alternative<Solved>(oracle));
    CHECK(std::get<Solved>(oracle).plan.horizon == 4);
}

TEST_CASE("swapping ends of a path with unit capacities is infeasible") {
    GroundMission gm = p3({GroundNodeGoal{NodeId{3}, {"a"}}, GroundNodeGoal{NodeId{1}, {"b"}}},
                          {{"a", Location{NodeId{1}}, {}}, {"b", Location{NodeId{3}}, {}}});
    PlannerConfig cfg;
    cfg.max_horizon = 12;
    PlanOutcome got = plan(gm, cfg);
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(got));
    CHECK(std::get<InfeasibleUpTo>(got).horizon == 12);

    PlanOutcome oracle = brute_force_plan(gm, 12);
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(oracle));

    // Monotonicity: still infeasible at any smaller bound.
    cfg.max_horizon = 5;
    PlanOutcome smaller = plan(gm, cfg);
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(smaller));
}

TEST_CASE("anonymous goals let either agent claim the node") {
    GroundMission gm = p3({GroundNodeGoal{NodeId{2}, {"a", "b"}}},
                          {{"a", Location{NodeId{1}}, {}}, {"b", Location{NodeId{3}}, {}}});
    PlanOutcome got = plan(gm, {});
    REQUIRE(std::holds_alternative<Solved>(got));
    CHECK(std::get<Solved>(got).plan.horizon == 2);
    CHECK(validator::validate(std::get<Solved>(got).plan, gm).empty());

    PlanOutcome oracle = brute_force_plan(gm, 8);
    REQUIRE(std::holds_alternative<Solved>(oracle));
    CHECK(std::get<Solved>(oracle).plan.horizon == 2);
}

TEST_CASE("brute force handles the degenerate cases") {
    GroundMission free_mission = p3({}, {{"a", Location{NodeId{1}}, {}}});
    PlanOutcome idle = brute_force_plan(free_mission, 8);
    REQUIRE(std::holds_alternative<Solved>(idle));
    CHECK(std::get<Solved>(idle).plan.horizon == 0);

    GroundMission blocked = p3({GroundNodeAvoid{NodeId{1}, {"a"}}},
                               {{"a", Location{NodeId{1}}, {}}});
    PlanOutcome stuck = brute_force_plan(blocked, 8);
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(stuck));
    CHECK(std::get<InfeasibleUpTo>(stuck).horizon == 0);
    // plan() agrees on the immediate verdict.
    PlanOutcome planned = plan(blocked, {});
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(planned));
    CHECK(std::get<InfeasibleUpTo>(planned).horizon == 0);
}

TEST_CASE("the brute-force guard refuses oversized instances") {
    GroundMission big;
    for (int i = 1; i <= 13; ++i) big.graph.add_node(NodeId{i});
    big.agents.push_back({"a", Location{NodeId{1}}, {}});
    CHECK_THROWS_AS(brute_force_plan(big, 4), InstanceTooLargeError);
    CHECK(std::holds_alternative<Solved>(brute_force_plan(big, 4, true)));
}

TEST_CASE("support constraints bind at every timestep including t=0") {
    // Agent starts on the watched node with nobody on the support node.
    GroundMission gm = p3({GroundNodeSupportedFrom{NodeId{1}, NodeId{2}}},
                          {{"a", Location{NodeId{1}}, {}}});
    PlanOutcome got = plan(gm, {});
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(got));
    CHECK(std::get<InfeasibleUpTo>(got).horizon == 0);
    PlanOutcome oracle = brute_force_plan(gm, 6);
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(oracle));
    CHECK(std::get<InfeasibleUpTo>(oracle).horizon == 0);

    // With a supporter already in place the same mission plans fine.
    GroundMission held = p3({GroundNodeSupportedFrom{NodeId{1}, NodeId{2}},
                             GroundNodeVisit{NodeId{2}, {"a"}}},
                            {{"a", Location{NodeId{1}}, {}},
                             {"b", Location{NodeId{2}}, {}}});
    PlanOutcome ok = plan(held, {});
    REQUIRE(std::holds_alternative<Solved>(ok));
    check_support_literally(std::get<Solved>(ok).plan, held);
}

TEST_CASE("the supporter must be a different agent") {
    // Only one agent: it can never supply its own support.
    GroundMission gm = p3({GroundNodeSupportedFrom{NodeId{2}, NodeId{2}},
                           GroundNodeVisit{NodeId{2}, {"a"}}},
                          {{"a", Location{NodeId{1}}, {}}});
    PlanOutcome got = plan(gm, {PlannerConfig{8, 60000, 0}});
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(got));
    PlanOutcome oracle = brute_force_plan(gm, 8);
    REQUIRE(std::holds_alternative<InfeasibleUpTo>(oracle));
}

TEST_CASE("goma: solved, valid, and at the hand-derived makespan") {
    GroundMission gm = ground_fixture("goma.ortac");
    auto start = std::chrono::steady_clock::now();
    PlanOutcome got = plan(gm, {});
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    REQUIRE(std::holds_alternative<Solved>(got));
    const Plan &p = std::get<Solved>(got).plan;
    CHECK(validator::validate(p, gm).empty());
    CHECK(p.horizon == 6);
    check_support_literally(p, gm);
    check_anonymous_goals(p, gm);
    CHECK(elapsed < 60000);
}

TEST_CASE("plans are deterministic for a fixed seed") {
    GroundMission gm = ground_fixture("micro1.ortac");
    PlannerConfig cfg;
    cfg.seed = 42;
    PlanOutcome a = plan(gm, cfg);
    PlanOutcome b = plan(gm, cfg);
    REQUIRE(std::holds_alternative<Solved>(a));
    REQUIRE(std::holds_alternative<Solved>(b));
    CHECK(std::get<Solved>(a).plan == std::get<Solved>(b).plan);

    // A different seed may reorder moves but stays optimal and valid.
    cfg.seed = 7;
    PlanOutcome c = plan(gm, cfg);
    REQUIRE(std::holds_alternative<Solved>(c));
    CHECK(std::get<Solved>(c).plan.horizon == std::get<Solved>(a).plan.horizon);
    CHECK(validator::validate(std::get<Solved>(c).plan, gm).empty());
}

TEST_CASE("plan agrees with the oracle on random instances") {
    int feasible = 0, infeasible = 0;
    for (unsigned seed = 1; seed <= 60; ++seed) {
        CAPTURE(seed);
        Mission m = test_support::random_oracle_instance(seed);
        analysis::CheckResult checked = analysis::check_static(m);
        REQUIRE(checked.ok());
        const GroundMission &gm = *checked.ground;

        PlannerConfig cfg;
        cfg.max_horizon = 8;
        cfg.seed = seed;
        PlanOutcome fast = plan(gm, cfg);
        PlanOutcome slow = brute_force_plan(gm, 8);

        if (const auto *s = std::get_if<Solved>(&slow)) {
            REQUIRE_MESSAGE(std::holds_alternative<Solved>(fast), "seed ", seed);
            CHECK(std::get<Solved>(fast).plan.horizon == s->plan.horizon);
            CHECK(validator::validate(std::get<Solved>(fast).plan, gm).empty());
            CHECK(validator::validate(s->plan, gm).empty());
            ++feasible;
        } else {
            REQUIRE_MESSAGE(std::holds_alternative<InfeasibleUpTo>(fast), "seed ", seed);
            ++infeasible;
        }
    }
    // The generator should exercise both outcomes.
    CHECK(feasible > 10);
    CHECK(infeasible > 3);
}

TEST_CASE("timeouts are honored") {
    GroundMission gm = ground_fixture("hard.ortac");
    PlannerConfig cfg;
    cfg.timeout_ms = 50;
    auto start = std::chrono::steady_clock::now();
    PlanOutcome got = plan(gm, cfg);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    CHECK(std::holds_alternative<planner::Timeout>(got));
    CHECK(elapsed < 550);  // 500 ms slack on top of the budget
}
