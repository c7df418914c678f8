#include "essograph/cli.hpp"

#include "essograph/citest.hpp"
#include "essograph/dataset.hpp"
#include "essograph/errors.hpp"
#include "essograph/graph.hpp"
#include "essograph/learner.hpp"
#include "essograph/synth.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

namespace essograph {
namespace {

std::string node_label(const Dataset& data, int v) {
    return data.names[static_cast<std::size_t>(v)];
}

std::vector<int> parse_order(const Dataset& data, const std::string& spec) {
    std::vector<int> order;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw ArgumentError("--order: empty column name");
        order.push_back(data.column_index(tok));
    }
    return order;
}

struct LearnArgs {
    std::string data_path;
    double alpha = 0.05;
    int max_cond = 3;
    bool no_consistency = false;
    std::string algorithm = "m3pc";
    std::string order;
    std::string format = "dot";
    std::string report_path;
    std::string ledger_path;
    std::string out_path;
};

int cmd_learn(const LearnArgs& args, std::ostream& out, std::ostream& err) {
    Dataset data = load_table_file(args.data_path);
    if (!args.order.empty()) data = data.permuted(parse_order(data, args.order));

    CallMeter meter;
    CiOptions opts;
    opts.alpha = args.alpha;
    opts.max_cond = args.max_cond;
    opts.consistency = !args.no_consistency;
    CiLedger ledger(data, meter, opts);
    int d = static_cast<int>(data.n_cols());

    MixedGraph graph(d);
    std::string rendered;
    std::string report;
    if (args.algorithm == "mmpc") {
        NeighborSets Z = mmpc_skeleton(ledger, d);
        for (int j = 0; j < d; ++j)
            for (int k : Z[j])
                if (j < k) graph.add_undirected(j, k);
        nlohmann::ordered_json rep;
        rep["algorithm"] = "mmpc";
        nlohmann::ordered_json nb = nlohmann::ordered_json::object();
        for (int j = 0; j < d; ++j) {
            nlohmann::ordered_json lst = nlohmann::ordered_json::array();
            for (int k : Z[j]) lst.push_back(node_label(data, k));
            nb[node_label(data, j)] = lst;
        }
        rep["neighbors"] = nb;
        rep["meter"]["data_calls"] = meter.data_calls.load();
        rep["meter"]["test_calls"] = meter.test_calls.load();
        report = rep.dump(2) + "\n";
    } else {
        std::vector<std::string> names(data.names.begin(), data.names.end());
        M3pcResult res = run_m3pc(ledger, d);
        graph = res.graph;
        report = report_json(res, names, meter);
    }

    std::vector<std::string> names(data.names.begin(), data.names.end());
    if (args.format == "json") rendered = to_json(graph, names);
    else rendered = to_dot(graph, names);

    if (args.out_path.empty()) {
        out << rendered;
    } else {
        std::ofstream f(args.out_path);
        if (!f) throw ArgumentError("cannot open output file: " + args.out_path);
        f << rendered;
    }
    if (!args.report_path.empty()) {
        std::ofstream f(args.report_path);
        if (!f) throw ArgumentError("cannot open report file: " + args.report_path);
        f << report;
    }
    if (!args.ledger_path.empty()) {
        std::ofstream f(args.ledger_path);
        if (!f) throw ArgumentError("cannot open ledger file: " + args.ledger_path);
        ledger.dump(f);
    }
    (void)err;
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& results_path,
              std::ostream& out, std::ostream& err) {
    std::ifstream cf(config_path);
    if (!cf) throw ArgumentError("cannot open config file: " + config_path);
    ExperimentConfig cfg = parse_experiment_config(cf);
    if (results_path.empty()) {
        run_experiment(cfg, out);
    } else {
        std::ofstream rf(results_path);
        if (!rf) throw ArgumentError("cannot open results file: " + results_path);
        run_experiment(cfg, rf);
    }
    (void)err;
    return 0;
}

int cmd_audit(const std::string& ledger_path, std::ostream& out, std::ostream& err) {
    std::ifstream lf(ledger_path);
    if (!lf) throw ArgumentError("cannot open ledger file: " + ledger_path);
    DumpedLedger dumped = load_dump(lf);
    std::vector<AuditViolation> violations = audit_closure(dumped.entries);
    if (violations.empty()) {
        out << "ledger consistent: " << dumped.entries.size()
            << " statements, no closure violations\n";
        return 0;
    }
    for (const auto& v : violations) {
        err << "violation: A(" << v.x << "," << v.y << " | " << v.w;
        for (int z : v.Z) err << "," << z;
        err << ") = 0 but A(" << v.y << "," << v.w << " | Z) = 0 and A("
            << v.x << "," << v.y << " | Z) = 1\n";
    }
    err << violations.size() << " closure violation(s)\n";
    return 1;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"essograph: essential-graph structure learning from categorical data"};
    app.require_subcommand(1);

    LearnArgs learn_args;
    CLI::App* learn = app.add_subcommand("learn", "learn an essential graph from a table");
    learn->add_option("--data", learn_args.data_path, "input table (CSV or TSV)")
        ->required();
    learn->add_option("--alpha", learn_args.alpha, "test significance level");
    learn->add_option("--max-cond", learn_args.max_cond,
                      "largest conditioning-set size");
    learn->add_flag("--no-consistency", learn_args.no_consistency,
                    "disable cross-statement reconciliation");
    learn->add_option("--algorithm", learn_args.algorithm, "m3pc or mmpc")
        ->check(CLI::IsMember({"m3pc", "mmpc"}));
    learn->add_option("--order", learn_args.order,
                      "comma-separated column names to reorder the variables");
    learn->add_option("--format", learn_args.format, "graph output format")
        ->check(CLI::IsMember({"dot", "json"}));
    learn->add_option("--report", learn_args.report_path, "write a JSON run report");
    learn->add_option("--ledger", learn_args.ledger_path,
                      "write the full test ledger to this file");
    learn->add_option("--out", learn_args.out_path,
                      "write the graph here instead of stdout");

    std::string synth_config, synth_results;
    CLI::App* synth = app.add_subcommand("synth", "run a synthetic benchmark sweep");
    synth->add_option("--config", synth_config, "experiment config (key = value lines)")
        ->required();
    synth->add_option("--results", synth_results,
                      "write JSON-lines results here instead of stdout");

    std::string audit_ledger;
    CLI::App* audit = app.add_subcommand("audit", "check a ledger dump for closure violations");
    audit->add_option("--ledger", audit_ledger, "ledger dump produced by learn --ledger")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::stringstream capture;
        int code = app.exit(e, capture, capture);
        if (code == 0) {
            out << capture.str();
            return 0;
        }
        err << capture.str();
        return 2;
    }

    try {
        if (learn->parsed()) return cmd_learn(learn_args, out, err);
        if (synth->parsed()) return cmd_synth(synth_config, synth_results, out, err);
        if (audit->parsed()) return cmd_audit(audit_ledger, out, err);
    } catch (const UnrecoverableConflictError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataFormatError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

} // namespace essograph
