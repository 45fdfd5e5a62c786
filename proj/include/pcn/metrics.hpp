#ifndef PCN_METRICS_HPP
#define PCN_METRICS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pcn/scenario.hpp"

namespace pcn {

struct MetricsRecord {
    Technique technique = Technique::Red;
    double bandwidth_bps = 0;
    std::uint64_t seed = 0;
    std::uint64_t tsp = 0;  // total sent packets
    std::uint64_t tap = 0;  // total acknowledged (delivered) packets
    std::uint64_t lp = 0;   // lost packets, tsp - tap
    double drop_rate_pct = 0;
    double throughput_mbps = 0;
    int admitted_sessions = 0;
    int blocked_sessions = 0;
    int terminated_sessions = 0;
};

// Eq. 7: Max_Throughput = Buf_Size / RTT, in bits/second. Rejects rtt <= 0.
double throughput(double buf_size_bytes, double rtt_s);

// Eqs. 8-9: LP = TSP - TAP, DR = LP*100/TSP (0 for an empty run).
// Rejects tap > tsp.
std::pair<std::uint64_t, double> loss_stats(std::uint64_t tsp, std::uint64_t tap);

struct BenchCell {
    double avg_throughput_mbps = 0;
    double avg_loss_pct = 0;
    double avg_sessions = 0;
};

// One row block per bandwidth tier, five techniques per tier in presentation
// order (AB, ECN, TB, BM, RED).
struct BenchmarkTable {
    std::vector<double> tiers_bps;                 // ascending
    std::vector<std::vector<BenchCell>> cells;     // [tier][technique order]

    const BenchCell& at(std::size_t tier_idx, Technique t) const;
};

// Mean over seeds per (tier, technique) cell. Requires a complete matrix:
// every cell present with one record per seed and the same seed set in every
// cell.
BenchmarkTable aggregate(const std::vector<MetricsRecord>& records);

struct TrendResult {
    std::string id;
    std::string description;
    bool pass = false;
};

// Ordinal claims from the source comparison (strict comparisons throughout):
//   T1 RED highest mean throughput at the top two tiers
//   T2 ECN highest mean throughput at the lowest tier
//   T3 TB in the bottom two of mean throughput at every tier
//   T4 AB admits the most sessions at the highest tier; TB the fewest at all
//   T5 RED lowest mean loss ratio at the lowest tier
// plus both readings of the contradictory top-tier loss row:
//   L500-table  AB lowest loss at the highest tier (table reading)
//   L500-text   TB lowest loss at the highest tier (prose reading)
std::vector<TrendResult> trend_check(const BenchmarkTable& table);

enum class RunMetric : std::uint8_t { Throughput, LossPct, Admitted };

// Number of seeds (within one tier) for which `t` is the strict best among
// all techniques; maximize=false means strictly lowest wins.
int count_seed_wins(const std::vector<MetricsRecord>& records, double tier_bps, Technique t,
                    RunMetric metric, bool maximize);

// CSV with header technique,bandwidth_mbps,seed,throughput_mbps,loss_pct,
// admitted,blocked,terminated; rows in (technique, tier, seed) order,
// RFC-4180 quoting.
std::string to_csv(std::vector<MetricsRecord> records);
std::string csv_field(const std::string& raw);

std::string format_record(const MetricsRecord& r);
std::string format_benchmark_table(const BenchmarkTable& table);

}  // namespace pcn

#endif
