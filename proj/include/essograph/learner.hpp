#pragma once

#include "essograph/citest.hpp"
#include "essograph/dataset.hpp"
#include "essograph/graph.hpp"
#include "essograph/orient.hpp"

#include <set>
#include <string>
#include <vector>

namespace essograph {

using NeighborSets = std::vector<std::vector<int>>;  // sorted candidate sets

// Baseline skeleton search: stage 1 (sequential growth), symmetry prune,
// stage 3 (subset elimination), symmetry prune again.
NeighborSets mmpc_skeleton(CiSource& src, int d);

// Stage 1: grow each candidate set by conditional tests against the current
// set; record first separating sets.
void m3pc_stage1(CiSource& src, int d, NeighborSets& Z, SepsetStore& sepsets);

// Stage 2: for every ordered pair with the membership broken, scan the
// shared neighbours for immorality candidates, then prune.
void m3pc_stage2(int d, NeighborSets& Z, const SepsetStore& sepsets, std::set<Vee>& I);

// Stage 3: eliminate neighbours separable by a subset of the live candidate
// set (smallest subsets first); removals refresh the separating set and add
// immorality candidates over the remaining shared neighbours.
void m3pc_stage3(CiSource& src, int d, NeighborSets& Z, SepsetStore& sepsets,
                 std::set<Vee>& I);

// Stage 4: final symmetry prune.
void m3pc_stage4(int d, NeighborSets& Z);

// Stage 5: drop candidates whose edges died, then resolve contradictory
// pairs of immoralities by one further test each.
void m3pc_stage5(CiSource& src, int d, const NeighborSets& Z, const SepsetStore& sepsets,
                 std::set<Vee>& I);

// Stage 6: assemble the mixed graph from the skeleton and immoralities.
MixedGraph m3pc_stage6(int d, const NeighborSets& Z, const std::set<Vee>& I);

struct M3pcResult {
    int d = 0;
    NeighborSets z_stage1, z_stage2, z_stage3, z_stage4;
    std::vector<Vee> i_stage2;  // candidates after stage 2
    std::vector<Vee> i_final;   // immoralities after stage 5
    MixedGraph pre_closure;     // stage-6 graph
    MixedGraph graph;           // closed (and repaired when needed) output
    SepsetStore sepsets;
    RepairLog repair_log;
    bool repaired = false;
};

// The full pipeline: stages 1-6, closure, and the repair pass whenever the
// closed graph fails validation or shows immoralities beyond the recorded
// set.
M3pcResult run_m3pc(CiSource& src, int d);

// Run report rendered as JSON (pretty, stable ordering).
std::string report_json(const M3pcResult& r, const std::vector<std::string>& names,
                        const CallMeter& meter);

} // namespace essograph
