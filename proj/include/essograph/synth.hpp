#pragma once

#include "essograph/citest.hpp"
#include "essograph/dataset.hpp"
#include "essograph/graph.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace essograph {

// Conditional probability tables for a DAG: for node v,
// table[v][parent_config][value], parent configs in row-major order of the
// sorted parent list.  Every row sums to 1 within 1e-12.
struct Cpts {
    std::vector<int> arities;
    std::vector<std::vector<int>> parents;  // sorted parent lists
    std::vector<std::vector<std::vector<double>>> table;
};

// Random DAG over a shuffled topological order; each forward pair is linked
// with probability edge_prob subject to the parent cap.
MixedGraph random_dag(int d, double edge_prob, int max_parents, unsigned seed);

// Dirichlet-style rows: normalized gamma draws with the given concentration.
Cpts sample_cpts(const MixedGraph& dag, const std::vector<int>& arities,
                 double concentration, unsigned seed);

// Ancestral sampling of n records; column names V0..V{d-1}, level labels
// "0", "1", ...  Throws ArgumentError when n <= 0.
Dataset forward_sample(const MixedGraph& dag, const Cpts& cpts, long n, unsigned seed);

// Conditional-independence source answered by d-separation on a known DAG:
// determine() = 0 exactly when x and y are d-separated by S.  Statements
// above max_cond are reported dependent, mirroring the ledger.
class OracleSource : public CiSource {
public:
    OracleSource(const MixedGraph& dag, int max_cond, CallMeter* meter = nullptr);
    int determine(int i, int j, const std::vector<int>& S) override;
    int max_cond() const override { return max_cond_; }

private:
    MixedGraph dag_;
    int max_cond_;
    CallMeter* meter_;
    std::map<LedgerKey, int> memo_;
};

OracleSource oracle_ledger(const MixedGraph& dag, int max_cond, CallMeter* meter = nullptr);

// Structural comparison of a learned mixed graph against the essential graph
// of the true DAG.
struct StructDiff {
    std::vector<std::pair<int, int>> extra_edges;          // learned only
    std::vector<std::pair<int, int>> missing_edges;        // truth only
    std::vector<Vee> immorality_diff;                      // symmetric difference
    std::vector<std::pair<int, int>> directed_mismatches;  // shared edges, wrong form
    bool empty() const {
        return extra_edges.empty() && missing_edges.empty() && immorality_diff.empty() &&
               directed_mismatches.empty();
    }
};

StructDiff struct_diff(const MixedGraph& learned, const MixedGraph& truth_dag);

// Batch experiment over sampled datasets.  Config is a plain key=value file.
struct ExperimentConfig {
    int trials = 0;
    int d = 6;
    long n = 2000;
    double alpha = 0.05;
    int max_cond = 3;
    bool consistency = true;
    std::string algorithm = "m3pc";  // or "mmpc"
    double edge_prob = 0.3;
    int max_parents = 3;
    int arity = 2;
    double concentration = 1.0;
    unsigned seed = 1;
};

// Throws ArgumentError on unknown keys or malformed values.
ExperimentConfig parse_experiment_config(std::istream& in);

// One JSON line per trial with the structural counts and meter readings.
void run_experiment(const ExperimentConfig& cfg, std::ostream& results);

} // namespace essograph
