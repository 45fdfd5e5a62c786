#ifndef PCN_BENCH_HPP
#define PCN_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pcn/metrics.hpp"
#include "pcn/scenario.hpp"

namespace pcn {

struct BenchConfig {
    ScenarioConfig base;                              // template; technique/bandwidth/seed vary
    std::vector<double> tiers_bps = {30e6, 40e6, 50e6};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    int max_threads = 0;  // 0: hardware concurrency, capped by PCN_BENCH_THREADS
};

struct BenchOutput {
    std::vector<MetricsRecord> records;  // canonical (technique, tier, seed) order
    BenchmarkTable table;
    std::vector<TrendResult> trends;
    std::string report;                  // table + trends + parameter notes
};

// A default parameter whose shipped value deviates from the base parameter
// ledger; surfaced in every benchmark report.
struct LedgerAdjustment {
    std::string key;
    std::string ledger_value;
    std::string effective_value;
    std::string reason;
};

const std::vector<LedgerAdjustment>& ledger_adjustments();

// Runs the full technique x tier x seed matrix. Scenario runs may execute on
// several threads; record order and the report are deterministic regardless.
BenchOutput run_bench(const BenchConfig& cfg);

int bench_thread_budget(int requested);  // applies PCN_BENCH_THREADS

}  // namespace pcn

#endif
