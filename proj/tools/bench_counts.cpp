// Micro-benchmark: parallel counting kernel against the serial reference.
// Builds a synthetic categorical table, then times contingency-table
// construction and a batch of G statistics under both kernels.

#include "essograph/citest.hpp"
#include "essograph/contingency.hpp"
#include "essograph/dataset.hpp"
#include "essograph/parallel.hpp"
#include "essograph/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

using namespace essograph;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int d = 10;
    long n = 200000;
    int arity = 3;
    unsigned seed = 7;
    try {
        if (argc > 1) d = std::stoi(argv[1]);
        if (argc > 2) n = std::stol(argv[2]);
        if (argc > 3) arity = std::stoi(argv[3]);
    } catch (const std::exception&) {
        std::fprintf(stderr, "usage: bench_counts [d] [n] [arity]\n");
        return 64;
    }

    MixedGraph dag = random_dag(d, 0.3, 3, seed);
    Cpts cpts = sample_cpts(dag, std::vector<int>(d, arity), 1.0, seed + 1);
    Dataset data = forward_sample(dag, cpts, n, seed + 2);

    std::vector<int> all(d);
    for (int v = 0; v < d; ++v) all[v] = v;

    std::printf("rows=%ld cols=%d arity=%d threads=%d\n", n, d, arity, thread_count());

    // Full-width table build, serial vs parallel.
    CallMeter build_meter;
    auto t0 = std::chrono::steady_clock::now();
    ContingencyTable ts = counts_serial(data, all, build_meter);
    double serial_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    ContingencyTable tp = counts(data, all, build_meter);
    double parallel_ms = ms_since(t0);

    bool identical = ts.cells == tp.cells && ts.total == tp.total;
    std::printf("%-28s %10.2f ms\n", "counts_serial (full table)", serial_ms);
    std::printf("%-28s %10.2f ms  (x%.2f)  cells %s\n", "counts (full table)",
                parallel_ms, serial_ms / parallel_ms, identical ? "identical" : "DIFFER");

    // Batch of order-2 G statistics: every pair conditioned on {next two}.
    CallMeter meter;
    TableCache cache(data, meter);
    t0 = std::chrono::steady_clock::now();
    int tests = 0;
    double checksum = 0.0;
    for (int x = 0; x < d; ++x)
        for (int y = x + 1; y < d; ++y) {
            std::vector<int> vars{x, y, (y + 1) % d, (y + 2) % d};
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            if (vars.size() < 4) continue;
            const ContingencyTable& t = cache.get(vars);
            checksum += g_statistic(t, x, y).g;
            ++tests;
        }
    double batch_ms = ms_since(t0);
    std::printf("%-28s %10.2f ms  (%d tests, %zu table builds, checksum %.3f)\n",
                "G batch via table cache", batch_ms, tests,
                static_cast<std::size_t>(meter.data_calls.load()), checksum);
    return identical ? 0 : 1;
}
