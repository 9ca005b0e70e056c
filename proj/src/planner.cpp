#include "ortacplus/planner.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace ortac::planner {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// GroundMission re-indexed for search: locations get dense indices in
// canonical order (nodes ascending, then edges), constraints become index
// sets, and per-agent distance tables cover every required location.
struct Instance {
    std::vector<Location> locs;
    std::map<Location, int> index;
    std::vector<std::vector<int>> succ;  // canonical order, includes self
    std::vector<int> cap;

    int n_agents = 0;
    std::vector<std::string> names;
    std::vector<int> init;
    std::vector<std::vector<char>> avoid;  // [agent][loc]

    struct Team {
        int loc;
        std::vector<int> agents;
    };
    std::vector<Team> goals;   // node goals
    std::vector<Team> visits;  // node and edge visits
    std::vector<std::pair<int, int>> supported;  // (node, support node)
    struct Imperative {
        int u1, n1, u2, n2;
    };
    std::vector<Imperative> imperatives;

    // sym_pred[i] names an interchangeable agent declared just before i
    // (same init, avoids, and constraint memberships), or -1. Used for
    // trajectory-lexicographic symmetry breaking.
    std::vector<int> sym_pred;

    // dist[agent][target] -> per-location distance, lazily built.
    std::vector<std::map<int, std::vector<int>>> dist_tables;

    explicit Instance(const analysis::GroundMission &gm) {
        for (const NodeId &n : gm.graph.nodes()) locs.push_back(n);
        for (const EdgeId &e : gm.graph.edges()) locs.push_back(e);
        for (size_t i = 0; i < locs.size(); ++i) index[locs[i]] = static_cast<int>(i);

        succ.resize(locs.size());
        cap.resize(locs.size());
        for (size_t i = 0; i < locs.size(); ++i) {
            for (const Location &s : successors(locs[i], gm.graph))
                succ[i].push_back(index.at(s));
            std::sort(succ[i].begin(), succ[i].end());
            cap[i] = gm.graph.capacity(locs[i]);
        }

        n_agents = static_cast<int>(gm.agents.size());
        avoid.assign(n_agents, std::vector<char>(locs.size(), 0));
        for (const Agent &a : gm.agents) {
            names.push_back(a.name);
            init.push_back(index.at(a.init));
        }

        auto agent_ids = [&](const std::vector<std::string> &names_in) {
            std::vector<int> out;
            for (const std::string &n : names_in) out.push_back(gm.agent_index(n));
            return out;
        };
        for (const GroundConstraint &gc : gm.ground) {
            if (const auto *g = std::get_if<GroundNodeGoal>(&gc)) {
                goals.push_back({index.at(Location{g->node}), agent_ids(g->agents)});
            } else if (const auto *v = std::get_if<GroundNodeVisit>(&gc)) {
                visits.push_back({index.at(Location{v->node}), agent_ids(v->agents)});
            } else if (const auto *ev = std::get_if<GroundEdgeVisit>(&gc)) {
                visits.push_back({index.at(Location{ev->edge}), agent_ids(ev->agents)});
            } else if (const auto *na = std::get_if<GroundNodeAvoid>(&gc)) {
                for (int a : agent_ids(na->agents))
                    avoid[a][index.at(Location{na->node})] = 1;
            } else if (const auto *ea = std::get_if<GroundEdgeAvoid>(&gc)) {
                for (int a : agent_ids(ea->agents))
                    avoid[a][index.at(Location{ea->edge})] = 1;
            } else if (const auto *sf = std::get_if<GroundNodeSupportedFrom>(&gc)) {
                supported.push_back(
                    {index.at(Location{sf->node}), index.at(Location{sf->from})});
            } else if (const auto *s = std::get_if<GroundSupport>(&gc)) {
                imperatives.push_back({gm.agent_index(s->unit1),
                                       index.at(Location{s->node1}),
                                       gm.agent_index(s->unit2),
                                       index.at(Location{s->node2})});
            }
        }
        dist_tables.resize(n_agents);

        auto in_team = [](const Team &team, int agent) {
            return std::find(team.agents.begin(), team.agents.end(), agent) !=
                   team.agents.end();
        };
        auto interchangeable = [&](int a, int b) {
            if (init[a] != init[b] || avoid[a] != avoid[b]) return false;
            for (const Team &g : goals)
                if (in_team(g, a) != in_team(g, b)) return false;
            for (const Team &v : visits)
                if (in_team(v, a) != in_team(v, b)) return false;
            for (const Imperative &imp : imperatives)
                if (imp.u1 == a || imp.u1 == b || imp.u2 == a || imp.u2 == b) return false;
            return true;
        };
        sym_pred.assign(n_agents, -1);
        for (int i = 1; i < n_agents; ++i)
            for (int j = i - 1; j >= 0; --j)
                if (interchangeable(j, i)) {
                    sym_pred[i] = j;
                    break;
                }
    }

    // BFS from target through the successor relation with the agent's avoided
    // locations removed. An avoided target is unreachable outright.
    const std::vector<int> &distances(int agent, int target) {
        auto it = dist_tables[agent].find(target);
        if (it != dist_tables[agent].end()) return it->second;
        std::vector<int> d(locs.size(), kInf);
        if (!avoid[agent][target]) {
            d[target] = 0;
            std::deque<int> queue{target};
            while (!queue.empty()) {
                int cur = queue.front();
                queue.pop_front();
                for (int next : succ[cur]) {
                    if (avoid[agent][next] || d[next] != kInf) continue;
                    d[next] = d[cur] + 1;
                    queue.push_back(next);
                }
            }
        }
        return dist_tables[agent].emplace(target, std::move(d)).first->second;
    }

    bool initial_state_legal() const {
        std::vector<int> occ(locs.size(), 0);
        for (int a = 0; a < n_agents; ++a) {
            if (avoid[a][init[a]]) return false;
            if (++occ[init[a]] > cap[init[a]]) return false;
        }
        for (const auto &[n1, n2] : supported) {
            if (occ[n1] == 0) continue;
            if (n1 == n2 ? occ[n1] < 2 : occ[n2] == 0) return false;
        }
        for (const Imperative &imp : imperatives)
            if (init[imp.u1] == imp.n1 && init[imp.u2] != imp.n2) return false;
        return true;
    }

    std::uint64_t initial_visit_mask() const {
        std::uint64_t mask = 0;
        for (size_t v = 0; v < visits.size(); ++v)
            for (int a : visits[v].agents)
                if (init[a] == visits[v].loc) mask |= std::uint64_t(1) << v;
        return mask;
    }
};

int lower_bound_impl(Instance &inst, int max_horizon) {
    int bound = 0;
    auto fold = [&](const Instance::Team &team) {
        int best = kInf;
        for (int a : team.agents)
            best = std::min(best, inst.distances(a, team.loc)[inst.init[a]]);
        bound = std::max(bound, best);
    };
    for (const auto &g : inst.goals) fold(g);
    for (const auto &v : inst.visits) fold(v);
    return bound >= kInf ? max_horizon + 1 : bound;
}

// Depth-first search over time-expanded assignments for one horizon.
class HorizonSearch {
public:
    HorizonSearch(Instance &inst, int horizon, unsigned seed,
                  std::chrono::steady_clock::time_point deadline)
        : inst_(inst), horizon_(horizon), deadline_(deadline) {
        pos_.assign(horizon + 1, std::vector<int>(inst.n_agents, 0));
        mask_.assign(horizon + 1, 0);
        occ_.assign(horizon + 1, std::vector<int>(inst.locs.size(), 0));
        move_order_.resize(inst.n_agents);
        std::mt19937 rng(seed);
        for (int a = 0; a < inst_.n_agents; ++a) {
            move_order_[a] = inst_.succ;
            if (seed != 0)
                for (auto &list : move_order_[a])
                    std::shuffle(list.begin(), list.end(), rng);
        }
    }

    bool timed_out() const { return timed_out_; }

    std::optional<Plan> run() {
        for (int a = 0; a < inst_.n_agents; ++a) pos_[0][a] = inst_.init[a];
        mask_[0] = inst_.initial_visit_mask();
        if (!search(0)) return std::nullopt;
        Plan p;
        p.horizon = horizon_;
        for (int a = 0; a < inst_.n_agents; ++a) {
            std::vector<Location> traj;
            traj.reserve(horizon_ + 1);
            for (int t = 0; t <= horizon_; ++t) traj.push_back(inst_.locs[pos_[t][a]]);
            p.traj[inst_.names[a]] = std::move(traj);
        }
        return p;
    }

private:
    Instance &inst_;
    int horizon_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<std::vector<int>> pos_;
    std::vector<std::uint64_t> mask_;
    std::vector<std::vector<int>> occ_;
    std::vector<std::vector<std::vector<int>>> move_order_;  // [agent][loc]
    std::unordered_set<std::string> failed_;
    static constexpr size_t kMemoCap = 1u << 21;
    unsigned tick_ = 0;
    bool timed_out_ = false;

    std::string state_key(int t) const {
        std::string key;
        key.reserve(2 + 8 + inst_.n_agents * 2);
        key.push_back(static_cast<char>(t & 0xff));
        key.push_back(static_cast<char>(t >> 8));
        std::uint64_t m = mask_[t];
        for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((m >> (8 * i)) & 0xff));
        for (int a = 0; a < inst_.n_agents; ++a) {
            key.push_back(static_cast<char>(pos_[t][a] & 0xff));
            key.push_back(static_cast<char>(pos_[t][a] >> 8));
        }
        return key;
    }

    bool clock_ok() {
        if (timed_out_) return false;
        if ((++tick_ & 63) == 0 && std::chrono::steady_clock::now() >= deadline_)
            timed_out_ = true;
        return !timed_out_;
    }

    // Every remaining obligation must still be reachable in the time left.
    bool feasible(int t) {
        int slack = horizon_ - t;
        for (const auto &g : inst_.goals) {
            int best = kInf;
            for (int a : g.agents) {
                best = std::min(best, inst_.distances(a, g.loc)[pos_[t][a]]);
                if (best <= slack) break;
            }
            if (best > slack) return false;
        }
        for (size_t v = 0; v < inst_.visits.size(); ++v) {
            if (mask_[t] >> v & 1) continue;
            int best = kInf;
            for (int a : inst_.visits[v].agents) {
                best = std::min(best, inst_.distances(a, inst_.visits[v].loc)[pos_[t][a]]);
                if (best <= slack) break;
            }
            if (best > slack) return false;
        }
        return true;
    }

    bool search(int t) {
        if (!clock_ok()) return false;
        if (!feasible(t)) return false;
        if (t == horizon_) return true;  // feasible() at zero slack is exact
        std::string key = state_key(t);
        if (failed_.count(key)) return false;
        if (assign(t, 0)) return true;
        if (!timed_out_ && failed_.size() < kMemoCap) failed_.insert(std::move(key));
        return false;
    }

    bool can_step(int t, int agent, int target) const {
        if (inst_.avoid[agent][target]) return false;
        const std::vector<int> &s = inst_.succ[pos_[t][agent]];
        return std::binary_search(s.begin(), s.end(), target);
    }

    // How close the team can still get to its target after agents [0..i]
    // have been placed at t+1: assigned members count from their new spot,
    // unassigned members from their t spot minus the step they may take.
    int team_bound(const Instance::Team &team, int t, int i) {
        int next = t + 1;
        int best = kInf;
        for (int a : team.agents) {
            int d = a <= i ? inst_.distances(a, team.loc)[pos_[next][a]]
                           : inst_.distances(a, team.loc)[pos_[t][a]] - 1;
            best = std::min(best, std::max(d, 0));
            if (best == 0) break;
        }
        return best;
    }

    // Incremental consistency after assigning agents [0..i] at t+1: distance
    // obligations for every team constraint, plus support implications. Once
    // the last agent is placed this is an exact support check.
    bool consistent(int t, int i) {
        int next = t + 1;
        int slack = horizon_ - next;
        for (const auto &g : inst_.goals)
            if (team_bound(g, t, i) > slack) return false;
        for (size_t v = 0; v < inst_.visits.size(); ++v) {
            if (mask_[t] >> v & 1) continue;
            if (team_bound(inst_.visits[v], t, i) > slack) return false;
        }
        auto unassigned_can_reach = [&](int target) {
            for (int j = i + 1; j < inst_.n_agents; ++j)
                if (can_step(t, j, target)) return true;
            return false;
        };
        for (const auto &[n1, n2] : inst_.supported) {
            int at_n1 = 0, at_n2 = 0;
            for (int j = 0; j <= i; ++j) {
                if (pos_[next][j] == n1) ++at_n1;
                if (pos_[next][j] == n2) ++at_n2;
            }
            if (at_n1 == 0) continue;
            if (n1 == n2) {
                if (at_n1 < 2 && !unassigned_can_reach(n1)) return false;
            } else {
                if (at_n2 == 0 && !unassigned_can_reach(n2)) return false;
            }
        }
        for (const auto &imp : inst_.imperatives) {
            if (imp.u1 <= i && pos_[next][imp.u1] == imp.n1) {
                if (imp.u2 <= i) {
                    if (pos_[next][imp.u2] != imp.n2) return false;
                } else if (!can_step(t, imp.u2, imp.n2)) {
                    return false;
                }
            }
        }
        return true;
    }

    bool assign(int t, int i) {
        if (!clock_ok()) return false;
        int next = t + 1;
        if (i == inst_.n_agents) {
            std::uint64_t mask = mask_[t];
            for (size_t v = 0; v < inst_.visits.size(); ++v) {
                if (mask >> v & 1) continue;
                for (int a : inst_.visits[v].agents)
                    if (pos_[next][a] == inst_.visits[v].loc) {
                        mask |= std::uint64_t(1) << v;
                        break;
                    }
            }
            mask_[next] = mask;
            return search(next);
        }
        // Interchangeable agents keep lexicographically ordered trajectories:
        // while agent i's history matches its twin's, it may not move to a
        // smaller location.
        int floor_loc = -1;
        if (inst_.sym_pred[i] >= 0) {
            int p = inst_.sym_pred[i];
            bool tied = true;
            for (int s = 0; s <= t && tied; ++s) tied = pos_[s][p] == pos_[s][i];
            if (tied) floor_loc = pos_[next][p];
        }
        std::vector<int> &occ = occ_[next];
        for (int l : move_order_[i][pos_[t][i]]) {
            if (l < floor_loc) continue;
            if (inst_.avoid[i][l]) continue;
            if (occ[l] + 1 > inst_.cap[l]) continue;
            // No position exchanges: agents cannot pass through each other.
            bool swaps = false;
            for (int j = 0; j < i; ++j) {
                if (pos_[next][j] == pos_[t][i] && l == pos_[t][j] &&
                    pos_[t][i] != pos_[t][j]) {
                    swaps = true;
                    break;
                }
            }
            if (swaps) continue;
            pos_[next][i] = l;
            ++occ[l];
            if (consistent(t, i) && assign(t, i + 1)) {
                --occ[l];
                return true;
            }
            --occ[l];
        }
        return false;
    }
};

}  // namespace

int lower_bound(const analysis::GroundMission &gm, int max_horizon) {
    Instance inst(gm);
    return lower_bound_impl(inst, max_horizon);
}

PlanOutcome plan(const analysis::GroundMission &gm, const PlannerConfig &cfg) {
    Instance inst(gm);
    auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(cfg.timeout_ms);

    if (!inst.initial_state_legal()) return InfeasibleUpTo{0};
    if (inst.visits.size() > 64)
        throw InstanceTooLargeError("more than 64 ground visit constraints");

    int lb = lower_bound_impl(inst, cfg.max_horizon);
    if (lb > cfg.max_horizon) return InfeasibleUpTo{cfg.max_horizon};

    for (int horizon = lb; horizon <= cfg.max_horizon; ++horizon) {
        HorizonSearch search(inst, horizon, cfg.seed, deadline);
        std::optional<Plan> found = search.run();
        if (found) return Solved{std::move(*found)};
        if (search.timed_out()) return Timeout{std::nullopt};
    }
    return InfeasibleUpTo{cfg.max_horizon};
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

PlanOutcome brute_force_plan(const analysis::GroundMission &gm, int max_horizon,
                             bool ignore_size_guard) {
    size_t n_locs = gm.graph.nodes().size() + gm.graph.edges().size();
    if (!ignore_size_guard && (n_locs > 12 || gm.agents.size() > 3))
        throw InstanceTooLargeError(
            "instance exceeds the brute-force guard (|V|+|E| <= 12, agents <= 3)");

    Instance inst(gm);  // shared re-indexing; the search itself is independent
    const int n = inst.n_agents;
    if (inst.visits.size() >= 64)
        throw InstanceTooLargeError("more than 63 ground visit constraints");

    auto pack = [&](const std::vector<int> &pos, std::uint64_t mask) {
        std::string key;
        key.reserve(8 + n * 2);
        for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((mask >> (8 * i)) & 0xff));
        for (int a = 0; a < n; ++a) {
            key.push_back(static_cast<char>(pos[a] & 0xff));
            key.push_back(static_cast<char>(pos[a] >> 8));
        }
        return key;
    };

    auto state_legal = [&](const std::vector<int> &pos) {
        std::vector<int> occ(inst.locs.size(), 0);
        for (int a = 0; a < n; ++a) {
            if (inst.avoid[a][pos[a]]) return false;
            if (++occ[pos[a]] > inst.cap[pos[a]]) return false;
        }
        for (const auto &[n1, n2] : inst.supported) {
            if (occ[n1] == 0) continue;
            if (n1 == n2 ? occ[n1] < 2 : occ[n2] == 0) return false;
        }
        for (const auto &imp : inst.imperatives)
            if (pos[imp.u1] == imp.n1 && pos[imp.u2] != imp.n2) return false;
        return true;
    };

    auto visit_mask = [&](const std::vector<int> &pos, std::uint64_t mask) {
        for (size_t v = 0; v < inst.visits.size(); ++v) {
            if (mask >> v & 1) continue;
            for (int a : inst.visits[v].agents)
                if (pos[a] == inst.visits[v].loc) {
                    mask |= std::uint64_t(1) << v;
                    break;
                }
        }
        return mask;
    };

    std::uint64_t full_mask = inst.visits.empty()
                                  ? 0
                                  : (std::uint64_t(1) << inst.visits.size()) - 1;
    auto is_goal = [&](const std::vector<int> &pos, std::uint64_t mask) {
        if (mask != full_mask) return false;
        for (const auto &g : inst.goals) {
            bool hit = false;
            for (int a : g.agents)
                if (pos[a] == g.loc) {
                    hit = true;
                    break;
                }
            if (!hit) return false;
        }
        return true;
    };

    if (!state_legal(inst.init)) return InfeasibleUpTo{0};

    struct State {
        std::vector<int> pos;
        std::uint64_t mask;
        int parent;
    };
    std::vector<State> states;
    std::unordered_map<std::string, int> seen;
    std::vector<int> frontier;

    std::uint64_t mask0 = visit_mask(inst.init, 0);
    states.push_back({inst.init, mask0, -1});
    seen[pack(inst.init, mask0)] = 0;
    frontier.push_back(0);

    auto reconstruct = [&](int id, int depth) {
        std::vector<int> chain;
        for (int cur = id; cur >= 0; cur = states[cur].parent) chain.push_back(cur);
        std::reverse(chain.begin(), chain.end());
        Plan p;
        p.horizon = depth;
        for (int a = 0; a < n; ++a) {
            std::vector<Location> traj;
            for (int cur : chain) traj.push_back(inst.locs[states[cur].pos[a]]);
            p.traj[inst.names[a]] = std::move(traj);
        }
        return p;
    };

    for (int depth = 0; depth <= max_horizon; ++depth) {
        for (int id : frontier)
            if (is_goal(states[id].pos, states[id].mask))
                return Solved{reconstruct(id, depth)};
        if (depth == max_horizon) break;

        std::vector<int> next_frontier;
        for (int id : frontier) {
            std::vector<int> pos = states[id].pos;  // copies; expansion mutates
            std::vector<int> joint(n, 0);
            // Enumerate the product of per-agent moves in canonical order.
            auto expand = [&](auto &&self, int agent) -> void {
                if (agent == n) {
                    if (!state_legal(joint)) return;
                    for (int i = 0; i < n; ++i)
                        for (int j = i + 1; j < n; ++j)
                            if (joint[i] == pos[j] && joint[j] == pos[i] &&
                                pos[i] != pos[j])
                                return;  // position exchange
                    std::uint64_t mask = visit_mask(joint, states[id].mask);
                    std::string key = pack(joint, mask);
                    if (seen.count(key)) return;
                    int new_id = static_cast<int>(states.size());
                    seen[key] = new_id;
                    states.push_back({joint, mask, id});
                    next_frontier.push_back(new_id);
                    return;
                }
                for (int l : inst.succ[pos[agent]]) {
                    joint[agent] = l;
                    self(self, agent + 1);
                }
            };
            expand(expand, 0);
        }
        frontier = std::move(next_frontier);
        if (frontier.empty()) break;
    }
    return InfeasibleUpTo{max_horizon};
}

}  // namespace ortac::planner
