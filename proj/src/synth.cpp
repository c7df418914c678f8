#include "essograph/synth.hpp"

#include "essograph/errors.hpp"
#include "essograph/learner.hpp"

#include <algorithm>
#include <chrono>
#include <json.hpp>
#include <numeric>
#include <random>
#include <sstream>

namespace essograph {

MixedGraph random_dag(int d, double edge_prob, int max_parents, unsigned seed) {
    if (d <= 0) throw ArgumentError("random_dag: need at least one node");
    if (edge_prob < 0.0 || edge_prob > 1.0)
        throw ArgumentError("random_dag: edge_prob outside [0, 1]");
    if (max_parents < 0) throw ArgumentError("random_dag: negative parent cap");
    std::mt19937 gen(seed);
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    std::bernoulli_distribution flip(edge_prob);
    MixedGraph g(d);
    std::vector<int> indeg(d, 0);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            if (indeg[order[j]] >= max_parents) {
                flip(gen);  // keep the draw sequence independent of the cap
                continue;
            }
            if (flip(gen)) {
                g.add_directed(order[i], order[j]);
                ++indeg[order[j]];
            }
        }
    return g;
}

Cpts sample_cpts(const MixedGraph& dag, const std::vector<int>& arities,
                 double concentration, unsigned seed) {
    if (!dag.is_dag()) throw PreconditionError("sample_cpts: input is not a DAG");
    if (static_cast<int>(arities.size()) != dag.n)
        throw ArgumentError("sample_cpts: arity list size mismatch");
    for (int a : arities)
        if (a < 2) throw ArgumentError("sample_cpts: arities must be at least 2");
    if (concentration <= 0.0)
        throw ArgumentError("sample_cpts: concentration must be positive");

    std::mt19937 gen(seed);
    std::gamma_distribution<double> gamma(concentration, 1.0);
    Cpts c;
    c.arities = arities;
    c.parents.resize(dag.n);
    c.table.resize(dag.n);
    for (auto [u, v] : dag.directed) c.parents[v].push_back(u);
    for (int v = 0; v < dag.n; ++v) {
        std::sort(c.parents[v].begin(), c.parents[v].end());
        std::size_t configs = 1;
        for (int p : c.parents[v]) configs *= static_cast<std::size_t>(arities[p]);
        c.table[v].resize(configs);
        for (auto& row : c.table[v]) {
            row.resize(arities[v]);
            double sum = 0.0;
            for (double& x : row) {
                x = gamma(gen);
                if (x <= 0.0) x = 1e-12;
                sum += x;
            }
            for (double& x : row) x /= sum;
        }
    }
    return c;
}

Dataset forward_sample(const MixedGraph& dag, const Cpts& cpts, long n, unsigned seed) {
    if (n <= 0) throw ArgumentError("forward_sample: need a positive sample count");
    if (!dag.is_dag()) throw PreconditionError("forward_sample: input is not a DAG");
    std::vector<int> order = topological_order(dag);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Dataset ds;
    for (int v = 0; v < dag.n; ++v) {
        ds.names.push_back("V" + std::to_string(v));
        std::vector<std::string> lv;
        for (int a = 0; a < cpts.arities[v]; ++a) lv.push_back(std::to_string(a));
        ds.levels.push_back(std::move(lv));
    }
    ds.rows.assign(static_cast<std::size_t>(n), std::vector<int>(dag.n, 0));
    for (auto& row : ds.rows) {
        for (int v : order) {
            std::size_t cfg = 0;
            for (int p : cpts.parents[v])
                cfg = cfg * static_cast<std::size_t>(cpts.arities[p]) +
                      static_cast<std::size_t>(row[p]);
            const auto& dist = cpts.table[v][cfg];
            double u = unif(gen);
            int value = 0;
            double acc = 0.0;
            for (std::size_t k = 0; k < dist.size(); ++k) {
                acc += dist[k];
                if (u < acc || k + 1 == dist.size()) {
                    value = static_cast<int>(k);
                    break;
                }
            }
            row[v] = value;
        }
    }
    return ds;
}

OracleSource::OracleSource(const MixedGraph& dag, int max_cond, CallMeter* meter)
    : dag_(dag), max_cond_(max_cond), meter_(meter) {
    if (!dag_.is_dag()) throw PreconditionError("OracleSource: input is not a DAG");
}

int OracleSource::determine(int i, int j, const std::vector<int>& S) {
    LedgerKey key = canonical_key(i, j, S);
    if (static_cast<int>(key.S.size()) > max_cond_) return 1;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int v = d_separated(dag_, key.x, key.y, key.S) ? 0 : 1;
    if (meter_) meter_->test_calls.fetch_add(1);
    memo_.emplace(key, v);
    return v;
}

OracleSource oracle_ledger(const MixedGraph& dag, int max_cond, CallMeter* meter) {
    return OracleSource(dag, max_cond, meter);
}

StructDiff struct_diff(const MixedGraph& learned, const MixedGraph& truth_dag) {
    MixedGraph truth = essential_graph_of(truth_dag);
    StructDiff diff;
    auto lsk = learned.skeleton();
    auto tsk = truth.skeleton();
    std::set_difference(lsk.begin(), lsk.end(), tsk.begin(), tsk.end(),
                        std::back_inserter(diff.extra_edges));
    std::set_difference(tsk.begin(), tsk.end(), lsk.begin(), lsk.end(),
                        std::back_inserter(diff.missing_edges));
    auto limm = immoralities(learned);
    auto timm = immoralities(truth);
    std::set_symmetric_difference(limm.begin(), limm.end(), timm.begin(), timm.end(),
                                  std::back_inserter(diff.immorality_diff));
    std::vector<std::pair<int, int>> shared;
    std::set_intersection(lsk.begin(), lsk.end(), tsk.begin(), tsk.end(),
                          std::back_inserter(shared));
    for (auto [u, v] : shared) {
        bool same = (learned.has_undirected(u, v) && truth.has_undirected(u, v)) ||
                    (learned.has_directed(u, v) && truth.has_directed(u, v)) ||
                    (learned.has_directed(v, u) && truth.has_directed(v, u));
        if (!same) diff.directed_mismatches.push_back({u, v});
    }
    return diff;
}

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        if (auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
        auto trim = [](std::string t) {
            std::size_t b = t.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string{};
            std::size_t e = t.find_last_not_of(" \t\r");
            return t.substr(b, e - b + 1);
        };
        s = trim(s);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(lineno) +
                                ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        try {
            if (key == "trials") cfg.trials = std::stoi(val);
            else if (key == "d") cfg.d = std::stoi(val);
            else if (key == "n") cfg.n = std::stol(val);
            else if (key == "alpha") cfg.alpha = std::stod(val);
            else if (key == "max_cond") cfg.max_cond = std::stoi(val);
            else if (key == "consistency") cfg.consistency = (val == "on" || val == "true" || val == "1");
            else if (key == "algorithm") {
                if (val != "m3pc" && val != "mmpc")
                    throw ArgumentError("config: algorithm must be m3pc or mmpc");
                cfg.algorithm = val;
            }
            else if (key == "edge_prob") cfg.edge_prob = std::stod(val);
            else if (key == "max_parents") cfg.max_parents = std::stoi(val);
            else if (key == "arity") cfg.arity = std::stoi(val);
            else if (key == "concentration") cfg.concentration = std::stod(val);
            else if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(val));
            else
                throw ArgumentError("config line " + std::to_string(lineno) +
                                    ": unknown key '" + key + "'");
        } catch (const ArgumentError&) {
            throw;
        } catch (...) {
            throw ArgumentError("config line " + std::to_string(lineno) +
                                ": bad value '" + val + "' for key '" + key + "'");
        }
    }
    if (cfg.trials < 0) throw ArgumentError("config: trials must be non-negative");
    return cfg;
}

void run_experiment(const ExperimentConfig& cfg, std::ostream& results) {
    using json = nlohmann::ordered_json;
    for (int t = 0; t < cfg.trials; ++t) {
        unsigned seed = cfg.seed + static_cast<unsigned>(t);
        auto t0 = std::chrono::steady_clock::now();
        MixedGraph dag = random_dag(cfg.d, cfg.edge_prob, cfg.max_parents, seed);
        Cpts cpts = sample_cpts(dag, std::vector<int>(cfg.d, cfg.arity),
                                cfg.concentration, seed * 2654435761u + 1);
        Dataset data = forward_sample(dag, cpts, cfg.n, seed * 40503u + 7);
        CallMeter meter;
        CiLedger ledger(data, meter,
                        CiOptions{cfg.alpha, cfg.max_cond, cfg.consistency,
                                  kDefaultCellBudget});
        json rec;
        rec["trial"] = t;
        rec["seed"] = seed;
        if (cfg.algorithm == "mmpc") {
            NeighborSets Z = mmpc_skeleton(ledger, cfg.d);
            MixedGraph learned(cfg.d);
            for (int j = 0; j < cfg.d; ++j)
                for (int k : Z[j])
                    if (j < k) learned.add_undirected(j, k);
            StructDiff diff = struct_diff(learned, dag);
            rec["extra_edges"] = diff.extra_edges.size();
            rec["missing_edges"] = diff.missing_edges.size();
            rec["immorality_diff"] = diff.immorality_diff.size();
            rec["directed_mismatches"] = diff.directed_mismatches.size();
            rec["repaired"] = false;
        } else {
            M3pcResult res = run_m3pc(ledger, cfg.d);
            StructDiff diff = struct_diff(res.graph, dag);
            rec["extra_edges"] = diff.extra_edges.size();
            rec["missing_edges"] = diff.missing_edges.size();
            rec["immorality_diff"] = diff.immorality_diff.size();
            rec["directed_mismatches"] = diff.directed_mismatches.size();
            rec["repaired"] = res.repaired;
        }
        rec["test_calls"] = meter.test_calls.load();
        rec["data_calls"] = meter.data_calls.load();
        auto t1 = std::chrono::steady_clock::now();
        rec["elapsed_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        results << rec.dump() << "\n";
    }
}

} // namespace essograph
