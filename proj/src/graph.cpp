#include "essograph/graph.hpp"

#include "essograph/errors.hpp"
#include "essograph/orient.hpp"

#include <algorithm>
#include <deque>
#include <json.hpp>
#include <sstream>

namespace essograph {

namespace {

void check_node(const MixedGraph& g, int v, const char* who) {
    if (v < 0 || v >= g.n)
        throw ArgumentError(std::string(who) + ": node " + std::to_string(v) +
                            " out of range");
}

void require_dag(const MixedGraph& g, const char* who) {
    if (!g.undirected.empty())
        throw PreconditionError(std::string(who) + ": graph has undirected edges");
    if (!is_acyclic(g))
        throw PreconditionError(std::string(who) + ": directed part is cyclic");
}

} // namespace

void MixedGraph::add_directed(int u, int v) {
    check_node(*this, u, "add_directed");
    check_node(*this, v, "add_directed");
    if (u == v) throw ArgumentError("add_directed: self loop");
    directed.insert({u, v});
}

void MixedGraph::add_undirected(int u, int v) {
    check_node(*this, u, "add_undirected");
    check_node(*this, v, "add_undirected");
    if (u == v) throw ArgumentError("add_undirected: self loop");
    undirected.insert({std::min(u, v), std::max(u, v)});
}

void MixedGraph::remove_edge(int u, int v) {
    directed.erase({u, v});
    directed.erase({v, u});
    undirected.erase({std::min(u, v), std::max(u, v)});
}

std::set<std::pair<int, int>> MixedGraph::skeleton() const {
    std::set<std::pair<int, int>> out = undirected;
    for (auto [u, v] : directed) out.insert({std::min(u, v), std::max(u, v)});
    return out;
}

bool MixedGraph::is_dag() const { return undirected.empty() && is_acyclic(*this); }

bool is_acyclic(const MixedGraph& g) {
    std::vector<int> indeg(g.n, 0);
    for (auto [u, v] : g.directed) ++indeg[v];
    std::deque<int> q;
    for (int v = 0; v < g.n; ++v)
        if (indeg[v] == 0) q.push_back(v);
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        ++seen;
        for (auto [a, b] : g.directed)
            if (a == v && --indeg[b] == 0) q.push_back(b);
    }
    return seen == g.n;
}

std::vector<int> topological_order(const MixedGraph& g) {
    std::vector<int> indeg(g.n, 0);
    for (auto [u, v] : g.directed) ++indeg[v];
    std::vector<int> order;
    std::deque<int> q;
    for (int v = 0; v < g.n; ++v)
        if (indeg[v] == 0) q.push_back(v);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        order.push_back(v);
        for (auto [a, b] : g.directed)
            if (a == v && --indeg[b] == 0) q.push_back(b);
    }
    if (static_cast<int>(order.size()) != g.n)
        throw PreconditionError("topological_order: graph is cyclic");
    return order;
}

bool d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& Z) {
    require_dag(dag, "d_separated");
    check_node(dag, x, "d_separated");
    check_node(dag, y, "d_separated");
    if (x == y) throw ArgumentError("d_separated: x and y must differ");
    for (int z : Z) {
        check_node(dag, z, "d_separated");
        if (z == x || z == y)
            throw ArgumentError("d_separated: conditioning set contains an endpoint");
    }

    // Ancestral set of {x, y} ∪ Z.
    std::vector<std::vector<int>> parents(dag.n);
    for (auto [u, v] : dag.directed) parents[v].push_back(u);
    std::vector<bool> anc(dag.n, false);
    std::deque<int> q{x, y};
    for (int z : Z) q.push_back(z);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (anc[v]) continue;
        anc[v] = true;
        for (int p : parents[v]) q.push_back(p);
    }

    // Moralize the induced subgraph, drop directions, delete Z.
    std::vector<bool> blocked(dag.n, false);
    for (int z : Z) blocked[z] = true;
    std::set<std::pair<int, int>> moral;
    auto link = [&](int u, int v) {
        if (!blocked[u] && !blocked[v]) moral.insert({std::min(u, v), std::max(u, v)});
    };
    for (auto [u, v] : dag.directed)
        if (anc[u] && anc[v]) link(u, v);
    for (int v = 0; v < dag.n; ++v) {
        if (!anc[v]) continue;
        for (std::size_t i = 0; i < parents[v].size(); ++i)
            for (std::size_t j = i + 1; j < parents[v].size(); ++j)
                link(parents[v][i], parents[v][j]);
    }

    std::vector<bool> reach(dag.n, false);
    std::deque<int> bfs{x};
    reach[x] = true;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (auto [a, b] : moral) {
            int other = -1;
            if (a == v) other = b;
            if (b == v) other = a;
            if (other >= 0 && !reach[other]) {
                reach[other] = true;
                bfs.push_back(other);
            }
        }
    }
    return !reach[y];
}

std::vector<Vee> vee_structures(const MixedGraph& g) {
    std::vector<Vee> out;
    for (int y = 0; y < g.n; ++y)
        for (int a = 0; a < g.n; ++a) {
            if (a == y || !g.adjacent(a, y)) continue;
            for (int c = a + 1; c < g.n; ++c) {
                if (c == y || !g.adjacent(c, y)) continue;
                if (!g.adjacent(a, c)) out.push_back({a, y, c});
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Vee> immoralities(const MixedGraph& g) {
    std::vector<Vee> out;
    for (int y = 0; y < g.n; ++y)
        for (int a = 0; a < g.n; ++a) {
            if (a == y || !g.has_directed(a, y)) continue;
            for (int c = a + 1; c < g.n; ++c) {
                if (c == y || !g.has_directed(c, y)) continue;
                if (!g.adjacent(a, c)) out.push_back({a, y, c});
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

bool markov_equivalent(const MixedGraph& g1, const MixedGraph& g2) {
    require_dag(g1, "markov_equivalent");
    require_dag(g2, "markov_equivalent");
    if (g1.n != g2.n) throw ArgumentError("markov_equivalent: node counts differ");
    return g1.skeleton() == g2.skeleton() && immoralities(g1) == immoralities(g2);
}

MixedGraph essential_graph_of(const MixedGraph& dag) {
    require_dag(dag, "essential_graph_of");
    std::vector<Vee> imms = immoralities(dag);
    MixedGraph g(dag.n);
    for (auto [a, y, c] : imms) {
        g.add_directed(a, y);
        g.add_directed(c, y);
    }
    for (auto [u, v] : dag.skeleton())
        if (!g.has_directed(u, v) && !g.has_directed(v, u)) g.add_undirected(u, v);
    return close(g, imms);
}

namespace {

// True when some strongly-protected-edge structure forces an orientation of
// the undirected edge (w, y): a parent of one endpoint that is non-adjacent
// to the other; a directed two-step path between the endpoints; or a pair of
// non-adjacent common neighbours whose arcs meet in one endpoint while the
// other endpoint touches them undirected.
bool forcing_slot(const MixedGraph& g, int w, int y) {
    const std::pair<int, int> sides[2] = {{w, y}, {y, w}};
    for (auto [u, v] : sides) {
        for (int z = 0; z < g.n; ++z) {
            if (z == u || z == v) continue;
            if (g.has_directed(z, u) && !g.adjacent(z, v)) return true;        // structure 1
            if (g.has_directed(u, z) && g.has_directed(z, v)) return true;     // structure 2
        }
        for (int z1 = 0; z1 < g.n; ++z1) {
            if (z1 == u || z1 == v || !g.has_undirected(u, z1)) continue;
            if (!g.has_directed(z1, v)) continue;
            for (int z2 = z1 + 1; z2 < g.n; ++z2) {
                if (z2 == u || z2 == v || !g.has_undirected(u, z2)) continue;
                if (!g.has_directed(z2, v)) continue;
                if (!g.adjacent(z1, z2)) return true;                          // structure 3
            }
        }
    }
    return false;
}

// Chordality of the subgraph restricted to undirected edges, by maximum
// cardinality search and a perfect-elimination check.
bool undirected_part_chordal(const MixedGraph& g) {
    std::vector<std::set<int>> nbr(g.n);
    for (auto [u, v] : g.undirected) {
        nbr[u].insert(v);
        nbr[v].insert(u);
    }
    std::vector<int> weight(g.n, 0), order;
    std::vector<bool> numbered(g.n, false);
    for (int step = 0; step < g.n; ++step) {
        int best = -1;
        for (int v = 0; v < g.n; ++v)
            if (!numbered[v] && (best < 0 || weight[v] > weight[best])) best = v;
        numbered[best] = true;
        order.push_back(best);
        for (int u : nbr[best])
            if (!numbered[u]) ++weight[u];
    }
    std::vector<int> pos(g.n);
    for (int i = 0; i < g.n; ++i) pos[order[i]] = i;
    // Reverse MCS order is a candidate perfect elimination ordering.
    for (int i = g.n - 1; i >= 0; --i) {
        int v = order[i];
        // Earlier-numbered neighbours must form a clique through the latest
        // of them.
        std::vector<int> earlier;
        for (int u : nbr[v])
            if (pos[u] < i) earlier.push_back(u);
        if (earlier.size() < 2) continue;
        int pivot = earlier[0];
        for (int u : earlier)
            if (pos[u] > pos[pivot]) pivot = u;
        for (int u : earlier) {
            if (u == pivot) continue;
            if (!nbr[pivot].count(u)) return false;
        }
    }
    return true;
}

} // namespace

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    if (!acyclic) out.push_back("directed part contains a cycle");
    if (!closure_complete) out.push_back("an undirected edge sits in a forcing structure");
    if (!chordal) out.push_back("an undirected component is not triangulated");
    return out;
}

ValidationReport validate_essential(const MixedGraph& g) {
    ValidationReport r;
    r.acyclic = is_acyclic(g);
    r.closure_complete = true;
    for (auto [w, y] : g.undirected)
        if (forcing_slot(g, w, y)) {
            r.closure_complete = false;
            break;
        }
    r.chordal = undirected_part_chordal(g);
    return r;
}

MixedGraph consistent_extension(const MixedGraph& g) {
    ValidationReport rep = validate_essential(g);
    if (!rep.ok()) {
        std::string msg = "consistent_extension:";
        for (const auto& f : rep.failures()) msg += " " + f + ";";
        throw PreconditionError(msg);
    }
    MixedGraph work = g;
    MixedGraph out(g.n);
    out.directed = g.directed;
    std::vector<bool> removed(g.n, false);

    auto neighbors_und = [&](int v) {
        std::vector<int> out_n;
        for (auto [a, b] : work.undirected) {
            if (a == v) out_n.push_back(b);
            if (b == v) out_n.push_back(a);
        }
        return out_n;
    };
    auto neighbors_all = [&](int v) {
        std::set<int> s;
        for (auto [a, b] : work.directed) {
            if (a == v) s.insert(b);
            if (b == v) s.insert(a);
        }
        for (int u : neighbors_und(v)) s.insert(u);
        return s;
    };

    for (int step = 0; step < g.n; ++step) {
        int sink = -1;
        // Highest-index admissible sink first, so an isolated undirected
        // edge a—b comes out as a -> b.
        for (int v = g.n - 1; v >= 0; --v) {
            if (removed[v]) continue;
            bool has_out = false;
            for (auto [a, b] : work.directed)
                if (a == v) { has_out = true; break; }
            if (has_out) continue;
            auto und = neighbors_und(v);
            auto all = neighbors_all(v);
            bool ok = true;
            for (int u : und) {
                for (int wv : all) {
                    if (wv == u) continue;
                    if (!work.adjacent(u, wv)) { ok = false; break; }
                }
                if (!ok) break;
            }
            if (ok) { sink = v; break; }
        }
        if (sink < 0)
            throw PreconditionError("consistent_extension: no admissible sink found");
        for (int u : neighbors_und(sink)) out.add_directed(u, sink);
        // Remove the sink and its edges from the working graph.
        for (auto it = work.directed.begin(); it != work.directed.end();)
            it = (it->first == sink || it->second == sink) ? work.directed.erase(it) : ++it;
        for (auto it = work.undirected.begin(); it != work.undirected.end();)
            it = (it->first == sink || it->second == sink) ? work.undirected.erase(it) : ++it;
        removed[sink] = true;
    }
    return out;
}

std::vector<int> markov_blanket(const MixedGraph& dag, int v) {
    require_dag(dag, "markov_blanket");
    check_node(dag, v, "markov_blanket");
    std::set<int> mb;
    for (auto [a, b] : dag.directed) {
        if (b == v) mb.insert(a);  // parent
        if (a == v) {
            mb.insert(b);  // child
            for (auto [c, d] : dag.directed)
                if (d == b && c != v) mb.insert(c);  // co-parent
        }
    }
    mb.erase(v);
    return {mb.begin(), mb.end()};
}

std::string to_dot(const MixedGraph& g, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) < g.n)
        throw ArgumentError("to_dot: not enough node names");
    std::ostringstream out;
    out << "digraph {\n";
    for (int v = 0; v < g.n; ++v) out << "  " << names[v] << ";\n";
    for (auto [u, v] : g.directed)
        out << "  " << names[u] << " -> " << names[v] << ";\n";
    for (auto [u, v] : g.undirected)
        out << "  " << names[u] << " -- " << names[v] << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_json(const MixedGraph& g, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) < g.n)
        throw ArgumentError("to_json: not enough node names");
    nlohmann::ordered_json j;
    j["nodes"] = std::vector<std::string>(names.begin(), names.begin() + g.n);
    j["directed"] = nlohmann::ordered_json::array();
    for (auto [u, v] : g.directed)
        j["directed"].push_back({names[u], names[v]});
    j["undirected"] = nlohmann::ordered_json::array();
    for (auto [u, v] : g.undirected)
        j["undirected"].push_back({names[u], names[v]});
    return j.dump(2) + "\n";
}

} // namespace essograph
