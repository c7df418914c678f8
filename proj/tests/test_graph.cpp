#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "essograph/errors.hpp"
#include "essograph/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace essograph;

namespace {

// Brute-force d-separation: enumerate every undirected trail between x and y
// and check blocking node by node.  Exponential, fine for tiny graphs.
bool path_d_connects(const MixedGraph& dag, const std::vector<int>& trail,
                     const std::set<int>& Z) {
    auto is_ancestor_of_Z = [&](int v) {
        // BFS over children.
        std::vector<int> stack{v};
        std::set<int> seen;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            if (!seen.insert(u).second) continue;
            if (Z.count(u)) return true;
            for (auto [a, b] : dag.directed)
                if (a == u) stack.push_back(b);
        }
        return false;
    };
    for (std::size_t i = 1; i + 1 < trail.size(); ++i) {
        int prev = trail[i - 1], mid = trail[i], next = trail[i + 1];
        bool into_mid_left = dag.has_directed(prev, mid);
        bool into_mid_right = dag.has_directed(next, mid);
        bool collider = into_mid_left && into_mid_right;
        if (collider) {
            if (!is_ancestor_of_Z(mid)) return false;
        } else {
            if (Z.count(mid)) return false;
        }
    }
    return true;
}

bool brute_d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& Zv) {
    std::set<int> Z(Zv.begin(), Zv.end());
    // Enumerate all simple trails x..y in the skeleton.
    std::vector<std::vector<int>> trails;
    std::vector<int> cur{x};
    std::set<int> used{x};
    auto neighbors = [&](int v) {
        std::vector<int> out;
        for (int u = 0; u < dag.n; ++u)
            if (u != v && dag.adjacent(u, v)) out.push_back(u);
        return out;
    };
    std::function<void(int)> dfs = [&](int v) {
        if (v == y) {
            trails.push_back(cur);
            return;
        }
        for (int u : neighbors(v)) {
            if (used.count(u)) continue;
            used.insert(u);
            cur.push_back(u);
            dfs(u);
            cur.pop_back();
            used.erase(u);
        }
    };
    dfs(x);
    for (const auto& t : trails)
        if (path_d_connects(dag, t, Z)) return false;
    return true;
}

MixedGraph random_dag_local(int n, double p, std::mt19937& gen) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    std::bernoulli_distribution flip(p);
    MixedGraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (flip(gen)) g.add_directed(order[i], order[j]);
    return g;
}

// The five-variable survey skeleton with all arrowheads as published.
MixedGraph survey_graph() {
    MixedGraph g(6);  // A B C D E F = 0..5
    g.add_undirected(1, 3);   // B - D
    g.add_undirected(1, 4);   // B - E
    g.add_undirected(3, 4);   // D - E
    g.add_directed(2, 5);     // C -> F
    g.add_directed(3, 5);     // D -> F
    return g;
}

} // namespace

TEST_CASE("graph: edge bookkeeping and validation") {
    MixedGraph g(4);
    g.add_directed(0, 1);
    g.add_undirected(3, 2);
    CHECK(g.has_directed(0, 1));
    CHECK_FALSE(g.has_directed(1, 0));
    CHECK(g.has_undirected(2, 3));
    CHECK(g.has_undirected(3, 2));
    CHECK(g.adjacent(1, 0));
    CHECK_FALSE(g.adjacent(0, 2));
    CHECK(g.skeleton() == std::set<std::pair<int, int>>{{0, 1}, {2, 3}});
    g.remove_edge(1, 0);
    CHECK_FALSE(g.adjacent(0, 1));
    CHECK_THROWS_AS(g.add_directed(0, 0), ArgumentError);
    CHECK_THROWS_AS(g.add_undirected(1, 4), ArgumentError);
    CHECK_THROWS_AS(g.add_directed(-1, 2), ArgumentError);
}

TEST_CASE("graph: acyclicity and topological order") {
    MixedGraph g(3);
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    CHECK(is_acyclic(g));
    auto order = topological_order(g);
    CHECK(order.size() == 3);
    CHECK(std::find(order.begin(), order.end(), 0) <
          std::find(order.begin(), order.end(), 2));
    g.add_directed(2, 0);
    CHECK_FALSE(is_acyclic(g));
    CHECK_THROWS_AS(topological_order(g), PreconditionError);
}

TEST_CASE("graph: d-separation on the canonical collider chain") {
    // x -> m <- y: marginally separated, conditionally connected.
    MixedGraph g(4);
    g.add_directed(0, 2);
    g.add_directed(1, 2);
    g.add_directed(2, 3);
    CHECK(d_separated(g, 0, 1, {}));
    CHECK_FALSE(d_separated(g, 0, 1, {2}));
    CHECK_FALSE(d_separated(g, 0, 1, {3}));  // descendant opens the collider
    // chain x -> m -> y: the reverse.
    MixedGraph c(3);
    c.add_directed(0, 1);
    c.add_directed(1, 2);
    CHECK_FALSE(d_separated(c, 0, 2, {}));
    CHECK(d_separated(c, 0, 2, {1}));
}

TEST_CASE("graph: d-separation argument validation") {
    MixedGraph g(3);
    g.add_directed(0, 1);
    CHECK_THROWS_AS(d_separated(g, 0, 0, {}), ArgumentError);
    CHECK_THROWS_AS(d_separated(g, 0, 1, {1}), ArgumentError);
    MixedGraph cyc(3);
    cyc.add_directed(0, 1);
    cyc.add_directed(1, 2);
    cyc.add_directed(2, 0);
    CHECK_THROWS_AS(d_separated(cyc, 0, 1, {}), PreconditionError);
    MixedGraph mixed(3);
    mixed.add_undirected(0, 1);
    CHECK_THROWS_AS(d_separated(mixed, 0, 2, {}), PreconditionError);
}

TEST_CASE("graph: moralized reachability agrees with trail enumeration") {
    std::mt19937 gen(42);
    for (int trial = 0; trial < 60; ++trial) {
        MixedGraph dag = random_dag_local(5, 0.4, gen);
        for (int x = 0; x < 5; ++x)
            for (int y = x + 1; y < 5; ++y)
                for (int mask = 0; mask < 32; ++mask) {
                    if (mask & (1 << x) || mask & (1 << y)) continue;
                    std::vector<int> Z;
                    for (int v = 0; v < 5; ++v)
                        if (mask & (1 << v)) Z.push_back(v);
                    CAPTURE(trial);
                    CAPTURE(x);
                    CAPTURE(y);
                    CAPTURE(Z);
                    CHECK(d_separated(dag, x, y, Z) == brute_d_separated(dag, x, y, Z));
                }
    }
}

TEST_CASE("graph: survey skeleton vee structures") {
    MixedGraph g = survey_graph();
    auto vees = vee_structures(g);
    // (B,D,F), (C,F,D), (E,D,F): outer pair non-adjacent, smaller outer first.
    CHECK(vees == std::vector<Vee>{{1, 3, 5}, {2, 5, 3}, {4, 3, 5}});
    auto imms = immoralities(g);
    CHECK(imms == std::vector<Vee>{{2, 5, 3}});
}

TEST_CASE("graph: markov equivalence requires matching skeleton and immoralities") {
    MixedGraph chain(3), rev(3), collider(3);
    chain.add_directed(0, 1);
    chain.add_directed(1, 2);
    rev.add_directed(2, 1);
    rev.add_directed(1, 0);
    collider.add_directed(0, 1);
    collider.add_directed(2, 1);
    CHECK(markov_equivalent(chain, rev));
    CHECK_FALSE(markov_equivalent(chain, collider));
    MixedGraph other(3);
    other.add_directed(0, 1);
    CHECK_FALSE(markov_equivalent(chain, other));  // different skeleton
    MixedGraph mixed(3);
    mixed.add_undirected(0, 1);
    CHECK_THROWS_AS(markov_equivalent(chain, mixed), PreconditionError);
}

TEST_CASE("graph: essential graph of simple shapes") {
    // A chain has no immorality: everything stays undirected.
    MixedGraph chain(3);
    chain.add_directed(0, 1);
    chain.add_directed(1, 2);
    MixedGraph e = essential_graph_of(chain);
    CHECK(e.directed.empty());
    CHECK(e.undirected == std::set<std::pair<int, int>>{{0, 1}, {1, 2}});
    // A collider is fully directed.
    MixedGraph coll(3);
    coll.add_directed(0, 1);
    coll.add_directed(2, 1);
    e = essential_graph_of(coll);
    CHECK(e.directed == std::set<std::pair<int, int>>{{0, 1}, {2, 1}});
    CHECK(e.undirected.empty());
    // The downstream edge of an immorality is forced by the first closure rule.
    MixedGraph y(4);
    y.add_directed(0, 2);
    y.add_directed(1, 2);
    y.add_directed(2, 3);
    e = essential_graph_of(y);
    CHECK(e.has_directed(2, 3));
    CHECK(e.undirected.empty());
}

TEST_CASE("graph: validation catches each failure mode") {
    MixedGraph ok = survey_graph();
    ValidationReport r = validate_essential(ok);
    CHECK(r.acyclic);
    CHECK(r.closure_complete);
    CHECK(r.chordal);
    CHECK(r.ok());
    CHECK(r.failures().empty());

    // Directed cycle.
    MixedGraph cyc(3);
    cyc.add_directed(0, 1);
    cyc.add_directed(1, 2);
    cyc.add_directed(2, 0);
    r = validate_essential(cyc);
    CHECK_FALSE(r.acyclic);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.failures().empty());

    // Undirected edge in a forcing slot: z -> u with z, v non-adjacent
    // forces u -> v.
    MixedGraph slot(3);
    slot.add_directed(0, 1);
    slot.add_undirected(1, 2);
    r = validate_essential(slot);
    CHECK(r.acyclic);
    CHECK_FALSE(r.closure_complete);

    // Chordless 4-cycle.
    MixedGraph hole(4);
    hole.add_undirected(0, 1);
    hole.add_undirected(1, 2);
    hole.add_undirected(2, 3);
    hole.add_undirected(3, 0);
    r = validate_essential(hole);
    CHECK(r.acyclic);
    CHECK(r.closure_complete);
    CHECK_FALSE(r.chordal);
}

TEST_CASE("graph: consistent extension orients without new immoralities") {
    MixedGraph g = survey_graph();
    MixedGraph ext = consistent_extension(g);
    CHECK(ext.is_dag());
    CHECK(ext.undirected.empty());
    // Original arcs survive.
    CHECK(ext.has_directed(2, 5));
    CHECK(ext.has_directed(3, 5));
    // Same skeleton, same immoralities.
    CHECK(ext.skeleton() == g.skeleton());
    CHECK(immoralities(ext) == immoralities(g));
    // The extension of the extension's essential graph is stable.
    CHECK(essential_graph_of(ext) == essential_graph_of(consistent_extension(ext)));
}

TEST_CASE("graph: a single undirected edge extends to the higher-index sink") {
    MixedGraph g(2);
    g.add_undirected(0, 1);
    MixedGraph ext = consistent_extension(g);
    CHECK(ext.has_directed(0, 1));
}

TEST_CASE("graph: consistent extension refuses an invalid input") {
    MixedGraph hole(4);
    hole.add_undirected(0, 1);
    hole.add_undirected(1, 2);
    hole.add_undirected(2, 3);
    hole.add_undirected(3, 0);
    CHECK_THROWS_AS(consistent_extension(hole), PreconditionError);
}

TEST_CASE("graph: extension round-trips the essential graph of random DAGs") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        MixedGraph dag = random_dag_local(6, 0.35, gen);
        MixedGraph ess = essential_graph_of(dag);
        MixedGraph ext = consistent_extension(ess);
        CAPTURE(trial);
        REQUIRE(ext.is_dag());
        CHECK(markov_equivalent(ext, dag));
        CHECK(essential_graph_of(ext) == ess);
    }
}

TEST_CASE("graph: markov blanket of a collider parent") {
    MixedGraph g(5);
    g.add_directed(0, 2);
    g.add_directed(1, 2);
    g.add_directed(2, 3);
    g.add_directed(4, 3);
    CHECK(markov_blanket(g, 2) == std::vector<int>{0, 1, 3, 4});
    CHECK(markov_blanket(g, 0) == std::vector<int>{1, 2});
    CHECK(markov_blanket(g, 3) == std::vector<int>{2, 4});
}

TEST_CASE("graph: dot rendering is byte-stable") {
    MixedGraph g = survey_graph();
    std::string dot = to_dot(g, {"A", "B", "C", "D", "E", "F"});
    CHECK(dot ==
          "digraph {\n"
          "  A;\n"
          "  B;\n"
          "  C;\n"
          "  D;\n"
          "  E;\n"
          "  F;\n"
          "  C -> F;\n"
          "  D -> F;\n"
          "  B -- D;\n"
          "  B -- E;\n"
          "  D -- E;\n"
          "}\n");
}

TEST_CASE("graph: json rendering is byte-stable") {
    MixedGraph g(3);
    g.add_directed(0, 2);
    g.add_undirected(1, 2);
    std::string js = to_json(g, {"x", "y", "z"});
    CHECK(js ==
          "{\n"
          "  \"nodes\": [\n"
          "    \"x\",\n"
          "    \"y\",\n"
          "    \"z\"\n"
          "  ],\n"
          "  \"directed\": [\n"
          "    [\n"
          "      \"x\",\n"
          "      \"z\"\n"
          "    ]\n"
          "  ],\n"
          "  \"undirected\": [\n"
          "    [\n"
          "      \"y\",\n"
          "      \"z\"\n"
          "    ]\n"
          "  ]\n"
          "}\n");
}
