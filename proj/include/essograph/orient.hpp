#pragma once

#include "essograph/graph.hpp"

#include <iosfwd>
#include <vector>

namespace essograph {

// One action taken by the repair pass.
enum class RepairAction {
    cycle_broken,        // directed u -> v reversed to v -> u
    immorality_patched,  // new directed u -> v added between non-adjacent nodes
    edge_oriented,       // undirected u — v became directed u -> v
    fill_in_added,       // new undirected u — v added
};

struct RepairEntry {
    RepairAction action;
    int u = 0, v = 0;
    bool operator==(const RepairEntry&) const = default;
};

struct RepairLog {
    std::vector<RepairEntry> entries;
    bool empty() const { return entries.empty(); }
};

const char* repair_action_name(RepairAction a);

// Apply the log mechanically to a starting graph; with the log produced by
// repair(), replaying from repair's input reproduces its output.
MixedGraph replay(MixedGraph start, const RepairLog& log);

// Structure 3, applied once: for each recorded immorality (x1, y, x2) and
// each w with w—x1, w—x2 and w—y all undirected, direct w -> y.
MixedGraph close_structure3(MixedGraph g, const std::vector<Vee>& I);

// Structure 1, to fixpoint: z -> w, w—y undirected, z and y non-adjacent
// forces w -> y.
MixedGraph close_structure1(MixedGraph g);

// Structure 2, to fixpoint: w -> z -> y with w—y undirected forces w -> y.
MixedGraph close_structure2(MixedGraph g);

// Full closure: structure 3 once, then structures 1 and 2 to their joint
// fixpoint, scanning undirected edges in canonical order.
MixedGraph close(MixedGraph g, const std::vector<Vee>& I);

// Restore the three essential-graph conditions on a closed graph whose
// relation set had no faithful representation.  Protected arcs (those of I)
// are never re-oriented; conflicts confined to them raise
// UnrecoverableConflictError.  Edges are only added or re-oriented, never
// removed, so every input association survives.
MixedGraph repair(const MixedGraph& closed, const std::vector<Vee>& I, RepairLog& log);

} // namespace essograph
