#pragma once

#include "essograph/contingency.hpp"
#include "essograph/dataset.hpp"

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace essograph {

// Outcome of a single conditional G-test.
struct TestResult {
    double g = 0.0;
    int df = 0;
    double critical = 0.0;  // NaN when df == 0
    int n_valid_strata = 0;
    int decision = 0;  // 0 independent, 1 dependent
};

// Canonical identity of a conditional statement A(x, y; S): x < y, S sorted.
struct LedgerKey {
    int x = 0;
    int y = 0;
    std::vector<int> S;
    auto operator<=>(const LedgerKey&) const = default;
};

LedgerKey canonical_key(int i, int j, std::vector<int> S);

// G statistic over the table t for variables x, y, stratified by the
// remaining table variables.  A stratum contributes iff every joint (x, y)
// cell in it holds at least 5 observations; df = n_valid * (|x|-1)(|y|-1).
// Throws ArgumentError if x == y or either variable is absent from t.
TestResult g_statistic(const ContingencyTable& t, int x, int y);

// One raw decision at level alpha: dependent iff g exceeds the chi-squared
// critical value; zero valid strata force a dependent verdict.
TestResult raw_decision(TableCache& cache, int x, int y, const std::vector<int>& S,
                        double alpha);

struct AuditViolation {
    int x = 0, y = 0, w = 0;
    std::vector<int> Z;
    bool operator==(const AuditViolation&) const = default;
};

// Scan committed entries for closure breaks: A(X,Y;{W}∪Z)=0 together with
// A(Y,W;Z)=0 and A(X,Y;Z)=1 for a single extra variable W.
std::vector<AuditViolation> audit_closure(const std::map<LedgerKey, int>& entries);

// First-write-wins store of separating sets, keyed by unordered pair.
class SepsetStore {
public:
    // Record S for {i, j} unless a set is already present; true if stored.
    bool record(int i, int j, std::vector<int> S);
    // Unconditional replacement (used when a later elimination supersedes).
    void overwrite(int i, int j, std::vector<int> S);
    const std::vector<int>* find(int i, int j) const;
    std::vector<int> get_or_empty(int i, int j) const;
    const std::map<std::pair<int, int>, std::vector<int>>& all() const { return sets_; }

private:
    std::map<std::pair<int, int>, std::vector<int>> sets_;
};

struct CiOptions {
    double alpha = 0.05;
    int max_cond = 3;
    bool consistency = true;
    std::size_t cell_budget = kDefaultCellBudget;
};

// Common interface to the conditional-independence decision procedure:
// the data-driven ledger, or a graph oracle for synthetic runs.
class CiSource {
public:
    virtual ~CiSource() = default;
    // 0 = independent, 1 = dependent.
    virtual int determine(int i, int j, const std::vector<int>& S) = 0;
    virtual int max_cond() const = 0;
};

// Journal of committed conditional independence decisions over a dataset.
//
// With consistency enabled, determine() materializes the full lower-order
// lattice over the variable pool {i, j} ∪ S level by level; each level is
// decided by the consistency condition on the raw statistics, reconciled
// deterministically, and committed write-once in canonical key order.
// With consistency disabled, raw verdicts are committed directly.
class CiLedger : public CiSource {
public:
    CiLedger(const Dataset& ds, CallMeter& meter, CiOptions opts = {});

    int determine(int i, int j, const std::vector<int>& S) override;
    int max_cond() const override { return opts_.max_cond; }

    // Raw statistic for one statement; cached, so repeats cost nothing.
    TestResult raw_decision(int i, int j, const std::vector<int>& S);

    // Consistency condition for A(k1, k2; S) given the raw statistic and the
    // already-committed lower-order entries.  Returns 0/1.  Throws
    // ProtocolError if a required lower-order entry is undetermined.
    int condition_xi(int k1, int k2, const std::vector<int>& S);

    // Committed value (0/1) or 2 when undetermined.
    int lookup(int i, int j, const std::vector<int>& S) const;

    const std::map<LedgerKey, int>& entries() const { return entries_; }
    const std::vector<std::pair<LedgerKey, int>>& journal() const { return journal_; }
    // Raw statistic of a committed/tested key, if it was ever evaluated.
    const TestResult* stat(const LedgerKey& key) const;

    std::vector<AuditViolation> audit() const { return audit_closure(entries_); }

    double alpha() const { return opts_.alpha; }
    bool consistency_enabled() const { return opts_.consistency; }

    // Stable text dump: one line per committed entry, canonical order:
    //   A <x> <y> | <S...> = <v>  g=<g> df=<df>
    void dump(std::ostream& out) const;

    SepsetStore sepsets;

private:
    const TestResult& raw(const LedgerKey& key);
    int xi_of(const LedgerKey& key, const TestResult& stat) const;
    void commit(const LedgerKey& key, int value);

    const Dataset* ds_;
    CallMeter* meter_;
    CiOptions opts_;
    TableCache cache_;
    std::map<LedgerKey, int> entries_;
    std::map<LedgerKey, TestResult> stats_;
    std::vector<std::pair<LedgerKey, int>> journal_;
};

// A parsed ledger dump: committed entries plus their recorded statistics.
struct DumpedLedger {
    std::map<LedgerKey, int> entries;
    std::map<LedgerKey, std::pair<double, int>> stats;  // g, df
};

DumpedLedger load_dump(std::istream& in);

} // namespace essograph
