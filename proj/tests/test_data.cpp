#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "essograph/dataset.hpp"
#include "essograph/errors.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace essograph;

namespace {

std::string fixture(const std::string& name) {
    return std::string(ESSOGRAPH_FIXTURE_DIR) + "/" + name;
}

std::map<std::vector<int>, long> histogram(const Dataset& ds) {
    std::map<std::vector<int>, long> h;
    for (const auto& row : ds.rows) ++h[row];
    return h;
}

Dataset load_str(const std::string& text, const LoadOptions& opts = {}) {
    std::istringstream in(text);
    return load_table(in, opts);
}

Dataset expand_str(const std::string& text) {
    std::istringstream in(text);
    return expand_cell_counts(in);
}

} // namespace

TEST_CASE("data: survey table loads with expected shape and coding") {
    Dataset ds = load_table_file(fixture("wam.csv"));
    CHECK(ds.n_rows() == 1190);
    CHECK(ds.n_cols() == 6);
    CHECK(ds.names == std::vector<std::string>{"A", "B", "C", "D", "E", "F"});
    for (std::size_t c = 0; c < 6; ++c) CHECK(ds.arity(static_cast<int>(c)) == 2);
    // First-appearance coding: the first data row fixes code 0 per column.
    CHECK(ds.levels[0] == std::vector<std::string>{"n", "y"});
    CHECK(ds.levels[1] == std::vector<std::string>{"male", "female"});
    CHECK(ds.levels[2] == std::vector<std::string>{"urban", "suburban"});
    CHECK(ds.levels[3] == std::vector<std::string>{"n", "y"});
    CHECK(ds.levels[4] == std::vector<std::string>{"arts", "math"});
    CHECK(ds.levels[5] == std::vector<std::string>{"job", "college"});
    CHECK(ds.rows.front() == std::vector<int>{0, 0, 0, 0, 0, 0});
}

TEST_CASE("data: cell-count table expands to the same histogram") {
    Dataset full = load_table_file(fixture("wam.csv"));
    Dataset cells = expand_cell_counts_file(fixture("wam_cells.csv"));
    CHECK(cells.n_rows() == full.n_rows());
    CHECK(cells.names == full.names);
    CHECK(cells.levels == full.levels);
    CHECK(histogram(cells) == histogram(full));
}

TEST_CASE("data: column lookup and bad names") {
    Dataset ds = load_table_file(fixture("wam.csv"));
    CHECK(ds.column_index("A") == 0);
    CHECK(ds.column_index("F") == 5);
    CHECK_THROWS_AS(ds.column_index("G"), ArgumentError);
}

TEST_CASE("data: permuted reorders columns and validates the permutation") {
    Dataset ds = load_table_file(fixture("wam.csv"));
    Dataset p = ds.permuted({5, 4, 3, 2, 1, 0});
    CHECK(p.names == std::vector<std::string>{"F", "E", "D", "C", "B", "A"});
    CHECK(p.n_rows() == ds.n_rows());
    for (std::size_t r = 0; r < 20; ++r)
        for (int c = 0; c < 6; ++c)
            CHECK(p.rows[r][static_cast<std::size_t>(c)] ==
                  ds.rows[r][static_cast<std::size_t>(5 - c)]);
    CHECK_THROWS_AS(ds.permuted({0, 1, 2}), ArgumentError);
    CHECK_THROWS_AS(ds.permuted({0, 0, 1, 2, 3, 4}), ArgumentError);
    CHECK_THROWS_AS(ds.permuted({0, 1, 2, 3, 4, 6}), ArgumentError);
}

TEST_CASE("data: comma and tab delimiters") {
    Dataset a = load_str("x,y\n1,2\n3,2\n");
    CHECK(a.n_cols() == 2);
    CHECK(a.n_rows() == 2);
    CHECK(a.levels[0] == std::vector<std::string>{"1", "3"});
    Dataset b = load_str("x\ty\n1\t2\n3\t2\n");
    CHECK(b.names == a.names);
    CHECK(b.rows == a.rows);
}

TEST_CASE("data: format errors carry line numbers") {
    // Ragged row.
    try {
        load_str("a,b\n1,2\n1\n");
        FAIL("expected DataFormatError");
    } catch (const DataFormatError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    // Duplicate header.
    CHECK_THROWS_AS(load_str("a,a\n1,2\n"), DataFormatError);
    // Empty input / header only.
    CHECK_THROWS_AS(load_str(""), DataFormatError);
    CHECK_THROWS_AS(load_str("a,b\n"), DataFormatError);
    // Missing marker rejected by default.
    try {
        load_str("a,b\n1,2\n?,2\n");
        FAIL("expected DataFormatError");
    } catch (const DataFormatError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("data: allow_missing drops flagged rows") {
    LoadOptions opts;
    opts.allow_missing = true;
    Dataset ds = load_str("a,b\n1,2\n?,2\n3,?\n1,4\n", opts);
    CHECK(ds.n_rows() == 2);
    // Dropped rows leave no trace in the level coding.
    CHECK(ds.levels[0] == std::vector<std::string>{"1"});
    CHECK(ds.rows[1] == std::vector<int>{0, 1});

    LoadOptions custom;
    custom.allow_missing = true;
    custom.missing_marker = "NA";
    Dataset ds2 = load_str("a,b\n1,2\nNA,2\n", custom);
    CHECK(ds2.n_rows() == 1);
}

TEST_CASE("data: cell-count parsing rejects bad counts") {
    CHECK_THROWS_AS(expand_str("a,b,count\n1,2,x\n"), DataFormatError);
    CHECK_THROWS_AS(expand_str("a,b,count\n1,2,-3\n"), DataFormatError);
    Dataset ds = expand_str("a,b,count\n1,2,3\n4,2,0\n");
    CHECK(ds.n_rows() == 3);
    CHECK(ds.n_cols() == 2);
    // A zero-count cell contributes no rows and hence no level labels.
    CHECK(ds.levels[0] == std::vector<std::string>{"1"});
}

TEST_CASE("data: call meter counts and resets") {
    CallMeter m;
    m.data_calls.fetch_add(3);
    m.test_calls.fetch_add(5);
    CHECK(m.data_calls.load() == 3);
    CHECK(m.test_calls.load() == 5);
    m.reset();
    CHECK(m.data_calls.load() == 0);
    CHECK(m.test_calls.load() == 0);
}
