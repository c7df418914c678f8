#include "essograph/contingency.hpp"

#include "essograph/errors.hpp"
#include "essograph/parallel.hpp"

#include <algorithm>
#include <string>

#ifdef ESSOGRAPH_HAVE_OPENMP
#include <omp.h>
#endif

namespace essograph {

namespace {

void normalize_vars(std::vector<int>& vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
}

ContingencyTable make_shell(const Dataset& ds, std::vector<int> vars, std::size_t budget) {
    normalize_vars(vars);
    if (vars.empty()) throw ArgumentError("counts: empty variable set");
    ContingencyTable t;
    t.vars = std::move(vars);
    std::size_t size = 1;
    for (int v : t.vars) {
        if (v < 0 || v >= static_cast<int>(ds.n_cols()))
            throw ArgumentError("counts: variable index " + std::to_string(v) +
                                " out of range");
        t.arities.push_back(ds.arity(v));
        size *= static_cast<std::size_t>(t.arities.back());
        if (size > budget)
            throw ArgumentError("counts: table over " + std::to_string(t.vars.size()) +
                                " variables exceeds the cell budget of " +
                                std::to_string(budget));
    }
    t.cells.assign(size, 0);
    return t;
}

std::size_t row_cell(const ContingencyTable& t, const std::vector<int>& row) {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < t.vars.size(); ++p)
        idx = idx * static_cast<std::size_t>(t.arities[p]) +
              static_cast<std::size_t>(row[t.vars[p]]);
    return idx;
}

} // namespace

int ContingencyTable::position(int var) const {
    for (std::size_t p = 0; p < vars.size(); ++p)
        if (vars[p] == var) return static_cast<int>(p);
    return -1;
}

long ContingencyTable::at(const std::vector<int>& level_by_pos) const {
    if (level_by_pos.size() != vars.size())
        throw ArgumentError("at: level vector size mismatch");
    std::size_t idx = 0;
    for (std::size_t p = 0; p < vars.size(); ++p)
        idx = idx * static_cast<std::size_t>(arities[p]) +
              static_cast<std::size_t>(level_by_pos[p]);
    return cells[idx];
}

ContingencyTable counts_serial(const Dataset& ds, std::vector<int> vars, CallMeter& meter,
                               std::size_t cell_budget) {
    ContingencyTable t = make_shell(ds, std::move(vars), cell_budget);
    for (const auto& row : ds.rows) ++t.cells[row_cell(t, row)];
    t.total = static_cast<long>(ds.n_rows());
    meter.data_calls.fetch_add(1);
    return t;
}

ContingencyTable counts(const Dataset& ds, std::vector<int> vars, CallMeter& meter,
                        std::size_t cell_budget) {
#ifdef ESSOGRAPH_HAVE_OPENMP
    ContingencyTable t = make_shell(ds, std::move(vars), cell_budget);
    const long nrows = static_cast<long>(ds.n_rows());
    const int nthreads = static_cast<int>(std::min<std::size_t>(thread_count(), 64));
    std::vector<std::vector<long>> partial(nthreads, std::vector<long>(t.cells.size(), 0));
#pragma omp parallel num_threads(nthreads)
    {
        auto& local = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
        for (long r = 0; r < nrows; ++r) local[row_cell(t, ds.rows[r])]++;
    }
    for (const auto& local : partial)
        for (std::size_t c = 0; c < t.cells.size(); ++c) t.cells[c] += local[c];
    t.total = nrows;
    meter.data_calls.fetch_add(1);
    return t;
#else
    return counts_serial(ds, std::move(vars), meter, cell_budget);
#endif
}

ContingencyTable marginalize(const ContingencyTable& t, std::vector<int> keep) {
    normalize_vars(keep);
    if (keep.empty()) throw ArgumentError("marginalize: empty keep set");
    ContingencyTable out;
    std::vector<int> pos;  // positions of kept vars inside t
    for (int v : keep) {
        int p = t.position(v);
        if (p < 0)
            throw ArgumentError("marginalize: variable " + std::to_string(v) +
                                " is not in the table");
        pos.push_back(p);
        out.arities.push_back(t.arities[p]);
    }
    out.vars = std::move(keep);
    std::size_t size = 1;
    for (int a : out.arities) size *= static_cast<std::size_t>(a);
    out.cells.assign(size, 0);
    out.total = t.total;

    const std::size_t np = t.vars.size();
    std::vector<int> level(np, 0);
    for (std::size_t idx = 0; idx < t.cells.size(); ++idx) {
        if (t.cells[idx] != 0) {
            std::size_t oidx = 0;
            for (std::size_t k = 0; k < pos.size(); ++k)
                oidx = oidx * static_cast<std::size_t>(out.arities[k]) +
                       static_cast<std::size_t>(level[pos[k]]);
            out.cells[oidx] += t.cells[idx];
        }
        for (std::size_t p = np; p-- > 0;) {
            if (++level[p] < t.arities[p]) break;
            level[p] = 0;
        }
    }
    return out;
}

TableCache::TableCache(const Dataset& ds, CallMeter& meter, std::size_t cell_budget)
    : ds_(&ds), meter_(&meter), budget_(cell_budget) {}

const ContingencyTable& TableCache::get(std::vector<int> vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (auto it = tables_.find(vars); it != tables_.end()) return it->second;

    // Look for the smallest cached superset to marginalize from.
    const ContingencyTable* best = nullptr;
    for (const auto& [key, table] : tables_) {
        if (key.size() < vars.size()) continue;
        if (std::includes(key.begin(), key.end(), vars.begin(), vars.end())) {
            if (!best || table.vars.size() < best->vars.size()) best = &table;
        }
    }
    if (best) {
        auto [it, ok] = tables_.emplace(vars, marginalize(*best, vars));
        return it->second;
    }
    auto [it, ok] = tables_.emplace(vars, counts(*ds_, vars, *meter_, budget_));
    return it->second;
}

} // namespace essograph
