#include "essograph/dataset.hpp"

#include "essograph/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace essograph {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \r\n");
    return s.substr(b, e - b + 1);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> records;  // trimmed tokens
    std::vector<std::size_t> line_numbers;          // 1-based file lines
};

RawTable read_raw(std::istream& in) {
    RawTable t;
    std::string line;
    std::size_t lineno = 0;
    char delim = ',';
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (!have_header) {
            delim = line.find('\t') != std::string::npos ? '\t' : ',';
            for (auto& f : split_line(line, delim)) t.header.push_back(trim(f));
            have_header = true;
            continue;
        }
        std::vector<std::string> rec;
        for (auto& f : split_line(line, delim)) rec.push_back(trim(f));
        if (rec.size() != t.header.size())
            throw DataFormatError("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, found " +
                                  std::to_string(rec.size()));
        t.records.push_back(std::move(rec));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header) throw DataFormatError("input is empty");
    for (std::size_t i = 0; i < t.header.size(); ++i)
        for (std::size_t j = i + 1; j < t.header.size(); ++j)
            if (t.header[i] == t.header[j])
                throw DataFormatError("duplicate column name '" + t.header[i] + "'");
    return t;
}

Dataset encode(const RawTable& raw, const LoadOptions& opts, bool reject_body_empty = true) {
    Dataset ds;
    ds.names = raw.header;
    ds.levels.resize(ds.names.size());
    std::vector<std::map<std::string, int>> code(ds.names.size());
    for (std::size_t r = 0; r < raw.records.size(); ++r) {
        const auto& rec = raw.records[r];
        bool missing = false;
        for (const auto& f : rec) {
            if (f == opts.missing_marker) {
                if (!opts.allow_missing)
                    throw DataFormatError("line " + std::to_string(raw.line_numbers[r]) +
                                          ": missing value '" + opts.missing_marker +
                                          "' not allowed");
                missing = true;
            }
        }
        if (missing) continue;
        std::vector<int> row(rec.size());
        for (std::size_t c = 0; c < rec.size(); ++c) {
            auto [it, inserted] = code[c].try_emplace(rec[c], static_cast<int>(ds.levels[c].size()));
            if (inserted) ds.levels[c].push_back(rec[c]);
            row[c] = it->second;
        }
        ds.rows.push_back(std::move(row));
    }
    if (reject_body_empty && ds.rows.empty()) throw DataFormatError("table has no data rows");
    return ds;
}

} // namespace

int Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw ArgumentError("no column named '" + name + "'");
}

Dataset Dataset::permuted(const std::vector<int>& order) const {
    if (order.size() != n_cols())
        throw ArgumentError("permutation size does not match column count");
    std::vector<bool> seen(n_cols(), false);
    for (int v : order) {
        if (v < 0 || v >= static_cast<int>(n_cols()) || seen[v])
            throw ArgumentError("order is not a permutation of the columns");
        seen[v] = true;
    }
    Dataset out;
    out.names.resize(n_cols());
    out.levels.resize(n_cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.names[k] = names[order[k]];
        out.levels[k] = levels[order[k]];
    }
    out.rows.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<int> nr(r.size());
        for (std::size_t k = 0; k < order.size(); ++k) nr[k] = r[order[k]];
        out.rows.push_back(std::move(nr));
    }
    return out;
}

Dataset load_table(std::istream& in, const LoadOptions& opts) {
    return encode(read_raw(in), opts);
}

Dataset load_table_file(const std::string& path, const LoadOptions& opts) {
    std::ifstream f(path);
    if (!f) throw DataFormatError("cannot open '" + path + "'");
    return load_table(f, opts);
}

Dataset expand_cell_counts(std::istream& in) {
    RawTable raw = read_raw(in);
    if (raw.header.empty() || raw.header.back() != "count")
        throw DataFormatError("cell-count table must end with a 'count' column");
    RawTable expanded;
    expanded.header.assign(raw.header.begin(), raw.header.end() - 1);
    for (std::size_t r = 0; r < raw.records.size(); ++r) {
        const auto& rec = raw.records[r];
        long n = 0;
        try {
            n = std::stol(rec.back());
        } catch (...) {
            throw DataFormatError("line " + std::to_string(raw.line_numbers[r]) +
                                  ": count '" + rec.back() + "' is not an integer");
        }
        if (n < 0)
            throw DataFormatError("line " + std::to_string(raw.line_numbers[r]) +
                                  ": negative count");
        std::vector<std::string> body(rec.begin(), rec.end() - 1);
        for (long k = 0; k < n; ++k) {
            expanded.records.push_back(body);
            expanded.line_numbers.push_back(raw.line_numbers[r]);
        }
    }
    return encode(expanded, LoadOptions{});
}

Dataset expand_cell_counts_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataFormatError("cannot open '" + path + "'");
    return expand_cell_counts(f);
}

} // namespace essograph
