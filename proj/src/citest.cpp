#include "essograph/citest.hpp"

#include "essograph/chi_square.hpp"
#include "essograph/errors.hpp"
#include "essograph/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace essograph {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// All size-k subsets of pool (ascending) excluding two elements, in
// lexicographic order of member indices.
void for_each_subset(const std::vector<int>& items, int k,
                     const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (static_cast<int>(pick.size()) == k) {
            fn(pick);
            return;
        }
        for (std::size_t i = start; i < items.size(); ++i) {
            if (static_cast<int>(items.size() - i) < k - static_cast<int>(pick.size()))
                break;
            pick.push_back(items[i]);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);
}

} // namespace

LedgerKey canonical_key(int i, int j, std::vector<int> S) {
    LedgerKey key;
    key.x = std::min(i, j);
    key.y = std::max(i, j);
    key.S = sorted_unique(std::move(S));
    return key;
}

TestResult g_statistic(const ContingencyTable& t, int x, int y) {
    if (x == y) throw ArgumentError("g_statistic: x and y must differ");
    int px = t.position(x), py = t.position(y);
    if (px < 0 || py < 0)
        throw ArgumentError("g_statistic: variable not present in the table");
    const int ax = t.arities[px], ay = t.arities[py];

    // Strata are the joint levels of every other variable, enumerated in the
    // table's own cell order to keep summation order fixed.
    std::size_t n_strata = 1;
    std::vector<int> spos;
    for (std::size_t p = 0; p < t.vars.size(); ++p) {
        if (static_cast<int>(p) == px || static_cast<int>(p) == py) continue;
        spos.push_back(static_cast<int>(p));
        n_strata *= static_cast<std::size_t>(t.arities[p]);
    }
    std::vector<std::vector<long>> strata(n_strata,
                                          std::vector<long>(static_cast<std::size_t>(ax * ay), 0));

    const std::size_t np = t.vars.size();
    std::vector<int> level(np, 0);
    for (std::size_t idx = 0; idx < t.cells.size(); ++idx) {
        std::size_t s = 0;
        for (int p : spos) s = s * static_cast<std::size_t>(t.arities[p]) +
                               static_cast<std::size_t>(level[p]);
        strata[s][static_cast<std::size_t>(level[px] * ay + level[py])] += t.cells[idx];
        for (std::size_t p = np; p-- > 0;) {
            if (++level[p] < t.arities[p]) break;
            level[p] = 0;
        }
    }

    TestResult res;
    for (const auto& cellsxy : strata) {
        bool valid = true;
        for (long c : cellsxy)
            if (c < 5) { valid = false; break; }
        if (!valid) continue;
        ++res.n_valid_strata;
        long ns = 0;
        std::vector<long> nx(ax, 0), ny(ay, 0);
        for (int xx = 0; xx < ax; ++xx)
            for (int yy = 0; yy < ay; ++yy) {
                long c = cellsxy[static_cast<std::size_t>(xx * ay + yy)];
                ns += c;
                nx[xx] += c;
                ny[yy] += c;
            }
        for (int xx = 0; xx < ax; ++xx)
            for (int yy = 0; yy < ay; ++yy) {
                long c = cellsxy[static_cast<std::size_t>(xx * ay + yy)];
                if (c > 0)
                    res.g += 2.0 * static_cast<double>(c) *
                             std::log(static_cast<double>(c) * static_cast<double>(ns) /
                                      (static_cast<double>(nx[xx]) * static_cast<double>(ny[yy])));
            }
    }
    res.df = res.n_valid_strata * (ax - 1) * (ay - 1);
    res.critical = std::numeric_limits<double>::quiet_NaN();
    res.decision = 1;
    return res;
}

namespace {

TestResult finish_raw(TestResult r, double alpha) {
    if (r.df == 0) {
        r.critical = std::numeric_limits<double>::quiet_NaN();
        r.decision = 1;  // no usable stratum: retain the dependence
    } else {
        r.critical = chi2_quantile(1.0 - alpha, r.df);
        r.decision = r.g > r.critical ? 1 : 0;
    }
    return r;
}

} // namespace

TestResult raw_decision(TableCache& cache, int x, int y, const std::vector<int>& S,
                        double alpha) {
    std::vector<int> vars = S;
    vars.push_back(x);
    vars.push_back(y);
    const ContingencyTable& t = cache.get(std::move(vars));
    return finish_raw(g_statistic(t, x, y), alpha);
}

std::vector<AuditViolation> audit_closure(const std::map<LedgerKey, int>& entries) {
    auto value = [&entries](int i, int j, std::vector<int> S) {
        auto it = entries.find(canonical_key(i, j, std::move(S)));
        return it == entries.end() ? 2 : it->second;
    };
    std::vector<AuditViolation> out;
    for (const auto& [key, v] : entries) {
        if (v != 0) continue;
        const std::pair<int, int> sides[2] = {{key.x, key.y}, {key.y, key.x}};
        for (auto [X, Y] : sides) {
            for (int W : key.S) {
                std::vector<int> Z;
                for (int t : key.S)
                    if (t != W) Z.push_back(t);
                if (value(Y, W, Z) == 0 && value(X, Y, Z) == 1)
                    out.push_back(AuditViolation{X, Y, W, Z});
            }
        }
    }
    return out;
}

bool SepsetStore::record(int i, int j, std::vector<int> S) {
    auto key = std::make_pair(std::min(i, j), std::max(i, j));
    if (sets_.count(key)) return false;
    sets_.emplace(key, sorted_unique(std::move(S)));
    return true;
}

void SepsetStore::overwrite(int i, int j, std::vector<int> S) {
    auto key = std::make_pair(std::min(i, j), std::max(i, j));
    sets_[key] = sorted_unique(std::move(S));
}

const std::vector<int>* SepsetStore::find(int i, int j) const {
    auto it = sets_.find(std::make_pair(std::min(i, j), std::max(i, j)));
    return it == sets_.end() ? nullptr : &it->second;
}

std::vector<int> SepsetStore::get_or_empty(int i, int j) const {
    const std::vector<int>* s = find(i, j);
    return s ? *s : std::vector<int>{};
}

CiLedger::CiLedger(const Dataset& ds, CallMeter& meter, CiOptions opts)
    : ds_(&ds), meter_(&meter), opts_(opts), cache_(ds, meter, opts.cell_budget) {}

const TestResult& CiLedger::raw(const LedgerKey& key) {
    auto it = stats_.find(key);
    if (it != stats_.end()) return it->second;
    TestResult r = essograph::raw_decision(cache_, key.x, key.y, key.S, opts_.alpha);
    meter_->test_calls.fetch_add(1);
    return stats_.emplace(key, r).first->second;
}

TestResult CiLedger::raw_decision(int i, int j, const std::vector<int>& S) {
    return raw(canonical_key(i, j, S));
}

int CiLedger::lookup(int i, int j, const std::vector<int>& S) const {
    auto it = entries_.find(canonical_key(i, j, S));
    return it == entries_.end() ? 2 : it->second;
}

// Consistency condition: raw dependence is final; otherwise the statement
// may be kept independent only if no committed lower-order pattern
// contradicts it through a single conditioning variable.
int CiLedger::xi_of(const LedgerKey& key, const TestResult& stat) const {
    if (stat.decision == 1) return 1;
    for (int z : key.S) {
        std::vector<int> Tz;
        for (int t : key.S)
            if (t != z) Tz.push_back(t);
        int a_xz = lookup(key.x, z, Tz);
        int a_yz = lookup(key.y, z, Tz);
        int a_xy = lookup(key.x, key.y, Tz);
        if (a_xz == 2 || a_yz == 2)
            throw ProtocolError("condition_xi: lower-order entry undetermined");
        if (a_xz == 0 || a_yz == 0) {
            if (a_xy == 2)
                throw ProtocolError("condition_xi: lower-order entry undetermined");
            if (a_xy == 1) return 1;
        }
    }
    return 0;
}

int CiLedger::condition_xi(int k1, int k2, const std::vector<int>& S) {
    if (k1 == k2) throw ArgumentError("condition_xi: variables must differ");
    LedgerKey key = canonical_key(k1, k2, S);
    return xi_of(key, raw(key));
}

void CiLedger::commit(const LedgerKey& key, int value) {
    entries_.emplace(key, value);
    journal_.emplace_back(key, value);
}

int CiLedger::determine(int i, int j, const std::vector<int>& S) {
    if (i == j) throw ArgumentError("determine: variables must differ");
    LedgerKey key = canonical_key(i, j, S);

    // No test is available above the conditioning cap; the statement is
    // reported dependent without a call and never committed, in either mode.
    if (static_cast<int>(key.S.size()) > opts_.max_cond) return 1;

    if (!opts_.consistency) {
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        int d = raw(key).decision;
        commit(key, d);
        return d;
    }

    if (auto it = entries_.find(key); it != entries_.end()) return it->second;

    std::vector<int> pool = key.S;
    pool.push_back(key.x);
    pool.push_back(key.y);
    pool = sorted_unique(std::move(pool));
    const ContingencyTable& pool_table = cache_.get(pool);

    const int m = static_cast<int>(key.S.size());
    for (int order = 0; order <= m; ++order) {
        // Collect every undetermined statement of this order over the pool.
        std::vector<LedgerKey> batch;
        for (std::size_t ia = 0; ia < pool.size(); ++ia) {
            for (std::size_t ib = ia + 1; ib < pool.size(); ++ib) {
                std::vector<int> rest;
                for (std::size_t ir = 0; ir < pool.size(); ++ir)
                    if (ir != ia && ir != ib) rest.push_back(pool[ir]);
                for_each_subset(rest, order, [&](const std::vector<int>& T) {
                    LedgerKey k{pool[ia], pool[ib], T};
                    if (!entries_.count(k)) batch.push_back(std::move(k));
                });
            }
        }
        std::sort(batch.begin(), batch.end());
        batch.erase(std::unique(batch.begin(), batch.end()), batch.end());

        // Raw statistics for the batch: marginalized from the pool table.
        // Each statement is independent of the others, so this is the
        // concurrent part; commits below stay serial and ordered.
        {
            std::vector<const LedgerKey*> need;
            for (const auto& k : batch)
                if (!stats_.count(k)) need.push_back(&k);
            std::vector<TestResult> results(need.size());
#ifdef ESSOGRAPH_HAVE_OPENMP
            const int nthreads = static_cast<int>(std::min<std::size_t>(thread_count(), 64));
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
            for (long idx = 0; idx < static_cast<long>(need.size()); ++idx) {
                const LedgerKey& k = *need[idx];
                std::vector<int> vars = k.S;
                vars.push_back(k.x);
                vars.push_back(k.y);
                ContingencyTable t = marginalize(pool_table, std::move(vars));
                results[idx] = finish_raw(g_statistic(t, k.x, k.y), opts_.alpha);
            }
            for (std::size_t idx = 0; idx < need.size(); ++idx) {
                stats_.emplace(*need[idx], results[idx]);
                meter_->test_calls.fetch_add(1);
            }
        }

        // Provisional verdicts through the consistency condition.
        std::map<LedgerKey, int> prov;
        for (const auto& k : batch) prov[k] = xi_of(k, stats_.at(k));

        // Level reconciliation: one deterministic pass in canonical order.
        // A provisional independence conflicts with a sibling independence
        // A(x, z; {y} ∪ T∖{z}) when an order-0 dependence witnesses that both
        // cannot hold; the committed sibling always wins, otherwise the
        // larger raw G stays independent (ties favour the smaller key).
        for (const auto& k : batch) {
            if (prov[k] != 0) continue;
            bool resolved = false;
            const std::pair<int, int> sides[2] = {{k.x, k.y}, {k.y, k.x}};
            for (auto [x, y] : sides) {
                for (int z : k.S) {
                    std::vector<int> sibS{y};
                    for (int t : k.S)
                        if (t != z) sibS.push_back(t);
                    LedgerKey sib = canonical_key(x, z, std::move(sibS));
                    if (sib == k) continue;
                    int sibval;
                    bool committed = false;
                    if (auto it = entries_.find(sib); it != entries_.end()) {
                        sibval = it->second;
                        committed = true;
                    } else if (auto pit = prov.find(sib); pit != prov.end()) {
                        sibval = pit->second;
                    } else {
                        continue;
                    }
                    if (sibval != 0) continue;
                    bool w1 = lookup(x, y, {}) == 1;
                    bool w2 = lookup(x, z, {}) == 1;
                    if (!w1 && !w2) continue;
                    double gk = stats_.at(k).g;
                    if (committed) {
                        prov[k] = 1;
                        resolved = true;
                        break;
                    }
                    double gs = stats_.at(sib).g;
                    if (gs > gk || (gs == gk && sib < k)) {
                        prov[k] = 1;
                        resolved = true;
                        break;
                    }
                    prov[sib] = 1;
                }
                if (resolved) break;
            }
        }

        for (const auto& k : batch) commit(k, prov[k]);
    }
    return entries_.at(key);
}

const TestResult* CiLedger::stat(const LedgerKey& key) const {
    auto it = stats_.find(key);
    return it == stats_.end() ? nullptr : &it->second;
}

void CiLedger::dump(std::ostream& out) const {
    for (const auto& [key, v] : entries_) {
        out << "A " << key.x << " " << key.y << " |";
        for (int s : key.S) out << " " << s;
        out << " = " << v;
        auto it = stats_.find(key);
        if (it != stats_.end()) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", it->second.g);
            out << "  g=" << buf << " df=" << it->second.df;
        }
        out << "\n";
    }
}

DumpedLedger load_dump(std::istream& in) {
    DumpedLedger led;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag != "A")
            throw DataFormatError("ledger dump line " + std::to_string(lineno) +
                                  ": expected 'A'");
        LedgerKey key;
        std::string tok;
        if (!(ss >> key.x >> key.y >> tok) || tok != "|")
            throw DataFormatError("ledger dump line " + std::to_string(lineno) +
                                  ": malformed key");
        int v = -1;
        double g = 0.0;
        int df = -1;
        bool have_stats = false;
        while (ss >> tok) {
            if (tok == "=") {
                if (!(ss >> v))
                    throw DataFormatError("ledger dump line " + std::to_string(lineno) +
                                          ": missing value");
            } else if (tok.rfind("g=", 0) == 0) {
                g = std::stod(tok.substr(2));
                have_stats = true;
            } else if (tok.rfind("df=", 0) == 0) {
                df = std::stoi(tok.substr(3));
            } else {
                key.S.push_back(std::stoi(tok));
            }
        }
        if (v != 0 && v != 1)
            throw DataFormatError("ledger dump line " + std::to_string(lineno) +
                                  ": value must be 0 or 1");
        led.entries[key] = v;
        if (have_stats) led.stats[key] = {g, df};
    }
    return led;
}

} // namespace essograph
