#include "essograph/orient.hpp"

#include "essograph/errors.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace essograph {

namespace {

bool und(const MixedGraph& g, int u, int v) { return g.has_undirected(u, v); }

void direct_edge(MixedGraph& g, int u, int v, RepairLog* log) {
    g.undirected.erase({std::min(u, v), std::max(u, v)});
    g.directed.insert({u, v});
    if (log) log->entries.push_back({RepairAction::edge_oriented, u, v});
}

// Structure 3 over the supplied immorality list, one pass in canonical
// order; reads the evolving graph.
void structure3_pass(MixedGraph& g, const std::vector<Vee>& I, RepairLog* log) {
    std::vector<Vee> sorted_i = I;
    std::sort(sorted_i.begin(), sorted_i.end());
    for (auto [i, y, k] : sorted_i) {
        for (int w = 0; w < g.n; ++w) {
            if (w == i || w == y || w == k) continue;
            if (und(g, w, i) && und(g, w, k) && und(g, w, y)) direct_edge(g, w, y, log);
        }
    }
}

// Joint fixpoint of structures 1 and 2: repeatedly find the canonically
// smallest undirected edge where either rule fires, apply every firing for
// that edge's scan, restart.
void structure12_fixpoint(MixedGraph& g, bool use1, bool use2, RepairLog* log) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> edges(g.undirected.begin(), g.undirected.end());
        for (auto [w, y] : edges) {
            for (int z = 0; z < g.n; ++z) {
                if (z == w || z == y) continue;
                const std::pair<int, int> sides[2] = {{w, y}, {y, w}};
                if (use1) {
                    for (auto [u, v] : sides) {
                        if (g.has_directed(z, u) && und(g, u, v) && !g.adjacent(z, v)) {
                            direct_edge(g, u, v, log);
                            changed = true;
                        }
                    }
                }
                if (use2) {
                    for (auto [u, v] : sides) {
                        if (g.has_directed(u, z) && g.has_directed(z, v) && und(g, u, v)) {
                            direct_edge(g, u, v, log);
                            changed = true;
                        }
                    }
                }
            }
            if (changed) break;
        }
    }
}

MixedGraph close_impl(MixedGraph g, const std::vector<Vee>& I, RepairLog* log) {
    structure3_pass(g, I, log);
    structure12_fixpoint(g, true, true, log);
    return g;
}

// First directed cycle found by DFS in ascending node order, as arc list.
std::vector<std::pair<int, int>> find_cycle(const MixedGraph& g) {
    std::vector<std::vector<int>> succ(g.n);
    for (auto [u, v] : g.directed) succ[u].push_back(v);
    std::vector<int> color(g.n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<int> stack;
    std::vector<std::pair<int, int>> cycle;

    std::function<bool(int)> dfs = [&](int v) -> bool {
        color[v] = 1;
        stack.push_back(v);
        for (int w : succ[v]) {
            if (color[w] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                for (auto p = it; p + 1 != stack.end(); ++p)
                    cycle.push_back({*p, *(p + 1)});
                cycle.push_back({stack.back(), w});
                return true;
            }
            if (color[w] == 0 && dfs(w)) return true;
        }
        stack.pop_back();
        color[v] = 2;
        return false;
    };
    for (int v = 0; v < g.n; ++v)
        if (color[v] == 0 && dfs(v)) return cycle;
    return {};
}

bool has_directed_path(const MixedGraph& g, int from, int to) {
    std::vector<bool> seen(g.n, false);
    std::vector<int> q{from};
    seen[from] = true;
    while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        if (v == to) return true;
        for (auto [a, b] : g.directed)
            if (a == v && !seen[b]) {
                seen[b] = true;
                q.push_back(b);
            }
    }
    return false;
}

// Chordalize the undirected part by minimum-degree elimination.  Every
// fill-in is also checked against the structure-3 slot: if the new edge
// (w, y) together with undirected companions z1, z2 and arcs into y forms
// that slot, the shielding edge z1—z2 is added as well.
void triangulate(MixedGraph& g, RepairLog& log) {
    std::vector<std::set<int>> work(g.n);
    for (auto [u, v] : g.undirected) {
        work[u].insert(v);
        work[v].insert(u);
    }
    std::vector<std::pair<int, int>> pending;

    auto add_fill = [&](int a, int b) {
        if (g.adjacent(a, b)) return;
        g.add_undirected(a, b);
        work[a].insert(b);
        work[b].insert(a);
        log.entries.push_back({RepairAction::fill_in_added, std::min(a, b), std::max(a, b)});
        pending.push_back({std::min(a, b), std::max(a, b)});
    };

    auto shield_slot = [&](int w, int y) {
        const std::pair<int, int> sides[2] = {{w, y}, {y, w}};
        for (auto [u, v] : sides) {
            for (int z1 = 0; z1 < g.n; ++z1) {
                if (z1 == u || z1 == v || !g.has_undirected(u, z1)) continue;
                if (!g.has_directed(z1, v)) continue;
                for (int z2 = z1 + 1; z2 < g.n; ++z2) {
                    if (z2 == u || z2 == v || !g.has_undirected(u, z2)) continue;
                    if (!g.has_directed(z2, v)) continue;
                    if (!g.adjacent(z1, z2)) add_fill(z1, z2);
                }
            }
        }
    };

    std::vector<bool> alive(g.n, true);
    for (int step = 0; step < g.n; ++step) {
        int best = -1;
        for (int v = 0; v < g.n; ++v) {
            if (!alive[v]) continue;
            if (best < 0 || work[v].size() < work[best].size()) best = v;
        }
        if (best < 0) break;
        std::vector<int> nbrs(work[best].begin(), work[best].end());
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = i + 1; j < nbrs.size(); ++j)
                if (!work[nbrs[i]].count(nbrs[j])) add_fill(nbrs[i], nbrs[j]);
        for (int u : nbrs) work[u].erase(best);
        work[best].clear();
        alive[best] = false;
    }

    while (!pending.empty()) {
        auto [w, y] = pending.back();
        pending.pop_back();
        shield_slot(w, y);
    }
}

} // namespace

const char* repair_action_name(RepairAction a) {
    switch (a) {
        case RepairAction::cycle_broken: return "cycle_broken";
        case RepairAction::immorality_patched: return "immorality_patched";
        case RepairAction::edge_oriented: return "edge_oriented";
        case RepairAction::fill_in_added: return "fill_in_added";
    }
    return "?";
}

MixedGraph replay(MixedGraph g, const RepairLog& log) {
    for (const auto& e : log.entries) {
        switch (e.action) {
            case RepairAction::cycle_broken:
                g.directed.erase({e.u, e.v});
                g.directed.insert({e.v, e.u});
                break;
            case RepairAction::immorality_patched:
                g.directed.insert({e.u, e.v});
                break;
            case RepairAction::edge_oriented:
                g.undirected.erase({std::min(e.u, e.v), std::max(e.u, e.v)});
                g.directed.insert({e.u, e.v});
                break;
            case RepairAction::fill_in_added:
                g.undirected.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
                break;
        }
    }
    return g;
}

MixedGraph close_structure3(MixedGraph g, const std::vector<Vee>& I) {
    structure3_pass(g, I, nullptr);
    return g;
}

MixedGraph close_structure1(MixedGraph g) {
    structure12_fixpoint(g, true, false, nullptr);
    return g;
}

MixedGraph close_structure2(MixedGraph g) {
    structure12_fixpoint(g, false, true, nullptr);
    return g;
}

MixedGraph close(MixedGraph g, const std::vector<Vee>& I) {
    return close_impl(std::move(g), I, nullptr);
}

MixedGraph repair(const MixedGraph& closed, const std::vector<Vee>& I, RepairLog& log) {
    std::set<std::pair<int, int>> protected_arcs;
    for (auto [a, y, c] : I) {
        protected_arcs.insert({a, y});
        protected_arcs.insert({c, y});
    }
    const std::set<std::pair<int, int>> orig_skel = closed.skeleton();
    const std::set<Vee> recorded(I.begin(), I.end());
    MixedGraph g = closed;

    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;

        // Break directed cycles by re-orienting the smallest unprotected arc.
        int guard = g.n * g.n + 8;
        while (true) {
            auto cycle = find_cycle(g);
            if (cycle.empty()) break;
            if (--guard <= 0)
                throw UnrecoverableConflictError("repair: cycle breaking did not converge");
            std::sort(cycle.begin(), cycle.end());
            std::pair<int, int> pick{-1, -1};
            for (auto e : cycle)
                if (!protected_arcs.count(e)) {
                    pick = e;
                    break;
                }
            if (pick.first < 0)
                throw UnrecoverableConflictError(
                    "repair: directed cycle consists of protected immorality arcs");
            g.directed.erase(pick);
            g.directed.insert({pick.second, pick.first});
            log.entries.push_back({RepairAction::cycle_broken, pick.first, pick.second});
            changed = true;
        }

        // Shield immoralities that emerged beyond the recorded set, when
        // both of their edges belong to the input skeleton: connect the
        // outer nodes with a directed edge, orientation chosen to avoid new
        // cycles, tie broken toward the smaller source index.
        for (const Vee& t : immoralities(g)) {
            if (recorded.count(t)) continue;
            auto [x, y, z] = t;
            std::pair<int, int> e1{std::min(x, y), std::max(x, y)};
            std::pair<int, int> e2{std::min(y, z), std::max(y, z)};
            if (!orig_skel.count(e1) || !orig_skel.count(e2)) continue;
            if (g.adjacent(x, z)) continue;
            int from = x, to = z;
            bool fwd_cycle = has_directed_path(g, z, x);
            bool rev_cycle = has_directed_path(g, x, z);
            if (fwd_cycle && !rev_cycle) {
                from = z;
                to = x;
            }
            g.add_directed(from, to);
            log.entries.push_back({RepairAction::immorality_patched, from, to});
            changed = true;
        }

        // Re-close over both the recorded and the current immoralities, with
        // every induced orientation journaled.
        {
            MixedGraph before = g;
            std::vector<Vee> all_i = I;
            for (const Vee& t : immoralities(g)) all_i.push_back(t);
            g = close_impl(std::move(g), all_i, &log);
            if (!(g == before)) changed = true;
        }

        ValidationReport rep = validate_essential(g);
        if (rep.acyclic && rep.closure_complete) {
            if (rep.chordal) return g;
            triangulate(g, log);
            continue;
        }
        if (!changed)
            throw UnrecoverableConflictError("repair: no admissible action remains");
    }
    throw UnrecoverableConflictError("repair did not stabilize");
}

} // namespace essograph
