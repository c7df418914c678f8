#pragma once

#include <atomic>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace essograph {

// Counts the two expensive operation classes of a learning run: full passes
// over the raw data (data_calls) and statistical test evaluations (test_calls).
struct CallMeter {
    std::atomic<long> data_calls{0};
    std::atomic<long> test_calls{0};

    CallMeter() = default;
    CallMeter(const CallMeter&) = delete;
    CallMeter& operator=(const CallMeter&) = delete;

    void reset() {
        data_calls = 0;
        test_calls = 0;
    }
};

// A fully categorical dataset.  Cell values are integer codes assigned per
// column in order of first appearance in the file.
struct Dataset {
    std::vector<std::string> names;                // column names
    std::vector<std::vector<std::string>> levels;  // per-column labels; code = index
    std::vector<std::vector<int>> rows;            // row-major coded records

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return names.size(); }
    int arity(int col) const { return static_cast<int>(levels.at(col).size()); }

    // Index of a named column; throws ArgumentError when absent.
    int column_index(const std::string& name) const;

    // A copy with columns rearranged so that new column k is old column
    // order[k].  Throws ArgumentError unless order is a permutation.
    Dataset permuted(const std::vector<int>& order) const;
};

struct LoadOptions {
    // When false, a cell equal to missing_marker raises DataFormatError.
    // When true, rows containing the marker are dropped.
    bool allow_missing = false;
    std::string missing_marker = "?";
};

// Parse a delimited text table.  The delimiter (comma or tab) is detected
// from the header line.  Codes follow first appearance.  Throws
// DataFormatError for ragged rows (reported with their line number),
// duplicate header names, or an empty body.
Dataset load_table(std::istream& in, const LoadOptions& opts = {});
Dataset load_table_file(const std::string& path, const LoadOptions& opts = {});

// Parse a cell-count table whose final column is named "count" and expand it
// to one record per observation, in file order.
Dataset expand_cell_counts(std::istream& in);
Dataset expand_cell_counts_file(const std::string& path);

} // namespace essograph
