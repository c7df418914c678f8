#pragma once

#include "essograph/dataset.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace essograph {

inline constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 20;

// A dense contingency table over a sorted set of variables.  Cell layout is
// row-major in variable order: the last variable has stride 1.
struct ContingencyTable {
    std::vector<int> vars;     // ascending column indices
    std::vector<int> arities;  // aligned with vars
    std::vector<long> cells;   // dense counts
    long total = 0;

    std::size_t n_cells() const { return cells.size(); }
    // Position of a variable inside vars, or -1.
    int position(int var) const;
    long at(const std::vector<int>& level_by_pos) const;
};

// Build a table by a full pass over the data (meter.data_calls is
// incremented).  vars are sorted and deduplicated.  Throws ArgumentError if
// a variable index is out of range or the dense cell count would exceed
// cell_budget.  Uses the parallel counting kernel when OpenMP is available.
ContingencyTable counts(const Dataset& ds, std::vector<int> vars, CallMeter& meter,
                        std::size_t cell_budget = kDefaultCellBudget);

// Serial reference implementation of the counting kernel (same contract,
// kept for testing and benchmarking).
ContingencyTable counts_serial(const Dataset& ds, std::vector<int> vars, CallMeter& meter,
                               std::size_t cell_budget = kDefaultCellBudget);

// Collapse a table onto a subset of its variables.  Never touches the raw
// data.  Throws ArgumentError if keep is not a subset of t.vars.
ContingencyTable marginalize(const ContingencyTable& t, std::vector<int> keep);

// Pool of contingency tables keyed by variable set.  A request is served by
// (in order): an exact cached table; marginalization from any cached
// superset (free); a counting pass over the data (one data_call).
class TableCache {
public:
    TableCache(const Dataset& ds, CallMeter& meter,
               std::size_t cell_budget = kDefaultCellBudget);
    const ContingencyTable& get(std::vector<int> vars);
    void clear() { tables_.clear(); }
    const Dataset& dataset() const { return *ds_; }
    std::size_t cell_budget() const { return budget_; }

private:
    const Dataset* ds_;
    CallMeter* meter_;
    std::size_t budget_;
    std::map<std::vector<int>, ContingencyTable> tables_;
};

} // namespace essograph
