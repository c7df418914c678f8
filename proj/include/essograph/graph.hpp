#pragma once

#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace essograph {

// A vee-structure or immorality (a, y, c): outer nodes a < c, center y.
using Vee = std::tuple<int, int, int>;

// Graph with at most one edge per node pair, each either directed or
// undirected.  Undirected edges are stored with the smaller endpoint first.
struct MixedGraph {
    int n = 0;
    std::set<std::pair<int, int>> directed;    // (from, to)
    std::set<std::pair<int, int>> undirected;  // (min, max)

    MixedGraph() = default;
    explicit MixedGraph(int nodes) : n(nodes) {}

    void add_directed(int u, int v);
    void add_undirected(int u, int v);
    void remove_edge(int u, int v);  // any form between u and v

    bool has_directed(int u, int v) const { return directed.count({u, v}) > 0; }
    bool has_undirected(int u, int v) const {
        return undirected.count({std::min(u, v), std::max(u, v)}) > 0;
    }
    bool adjacent(int u, int v) const {
        return has_directed(u, v) || has_directed(v, u) || has_undirected(u, v);
    }
    // Skeleton as sorted (min, max) pairs.
    std::set<std::pair<int, int>> skeleton() const;
    bool is_dag() const;  // no undirected edges and directed part acyclic

    bool operator==(const MixedGraph&) const = default;
};

// True when the directed part contains no directed cycle (undirected edges
// are ignored).
bool is_acyclic(const MixedGraph& g);

// A topological order of the directed part; PreconditionError when cyclic.
std::vector<int> topological_order(const MixedGraph& g);

// d-separation of x and y by Z in a DAG, decided on the moralized ancestral
// graph.  Throws PreconditionError if g is not a DAG, ArgumentError if
// x == y or either endpoint lies in Z.
bool d_separated(const MixedGraph& dag, int x, int y, const std::vector<int>& Z);

// All vee-structures of the skeleton: a - y - c with a, c non-adjacent,
// canonical a < c, sorted.
std::vector<Vee> vee_structures(const MixedGraph& g);

// All immoralities: a -> y <- c with a, c non-adjacent, a < c, sorted.
std::vector<Vee> immoralities(const MixedGraph& g);

// Two DAGs are Markov equivalent iff they share skeleton and immoralities.
bool markov_equivalent(const MixedGraph& g1, const MixedGraph& g2);

// The essential graph (CPDAG) of a DAG: immorality arcs plus the closure of
// the strongly-protected-edge structures over the skeleton.
MixedGraph essential_graph_of(const MixedGraph& dag);

// The three structural conditions an essential graph must satisfy.
struct ValidationReport {
    bool acyclic = false;           // directed part has no cycle
    bool closure_complete = false;  // no undirected edge sits in a forcing slot
    bool chordal = false;           // undirected components are triangulated
    bool ok() const { return acyclic && closure_complete && chordal; }
    std::vector<std::string> failures() const;
};

ValidationReport validate_essential(const MixedGraph& g);

// Orient every undirected edge so the result is a DAG with no additional
// immorality (sink elimination, preferring the highest-index candidate).
// Throws PreconditionError when validate_essential fails.
MixedGraph consistent_extension(const MixedGraph& g);

// Parents, children, and co-parents of v in a DAG, sorted.
std::vector<int> markov_blanket(const MixedGraph& dag, int v);

// Text renderings; node names must cover 0..n-1.
std::string to_dot(const MixedGraph& g, const std::vector<std::string>& names);
std::string to_json(const MixedGraph& g, const std::vector<std::string>& names);

} // namespace essograph
