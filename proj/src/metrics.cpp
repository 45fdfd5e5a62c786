#include "pcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcn {

double throughput(double buf_size_bytes, double rtt_s) {
    if (!(rtt_s > 0)) throw std::invalid_argument("throughput: RTT must be positive");
    if (buf_size_bytes < 0) throw std::invalid_argument("throughput: negative buffer size");
    return buf_size_bytes * 8.0 / rtt_s;
}

std::pair<std::uint64_t, double> loss_stats(std::uint64_t tsp, std::uint64_t tap) {
    if (tap > tsp) throw std::invalid_argument("loss_stats: acknowledged exceeds sent");
    const std::uint64_t lp = tsp - tap;
    if (tsp == 0) return {0, 0.0};
    return {lp, static_cast<double>(lp) * 100.0 / static_cast<double>(tsp)};
}

namespace {

std::size_t technique_index(Technique t) {
    for (std::size_t i = 0; i < std::size(kAllTechniques); ++i)
        if (kAllTechniques[i] == t) return i;
    throw std::logic_error("technique_index: corrupt technique");
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Short stable rendering for tier labels (30, 30.5, ...).
std::string mbps_label(double bps) {
    std::string s = fmt("%.6g", bps / 1e6);
    return s;
}

}  // namespace

const BenchCell& BenchmarkTable::at(std::size_t tier_idx, Technique t) const {
    return cells.at(tier_idx).at(technique_index(t));
}

BenchmarkTable aggregate(const std::vector<MetricsRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");

    std::set<double> tier_set;
    for (const auto& r : records) tier_set.insert(r.bandwidth_bps);

    BenchmarkTable table;
    table.tiers_bps.assign(tier_set.begin(), tier_set.end());

    // Seed multiset per cell; the matrix is complete when every cell carries
    // the same seed set exactly once.
    std::map<std::pair<std::size_t, std::size_t>, std::multiset<std::uint64_t>> seeds;
    std::map<std::pair<std::size_t, std::size_t>, BenchCell> sums;
    for (const auto& r : records) {
        const std::size_t tier =
            static_cast<std::size_t>(std::lower_bound(table.tiers_bps.begin(),
                                                      table.tiers_bps.end(), r.bandwidth_bps) -
                                     table.tiers_bps.begin());
        const auto key = std::make_pair(tier, technique_index(r.technique));
        seeds[key].insert(r.seed);
        auto& cell = sums[key];
        cell.avg_throughput_mbps += r.throughput_mbps;
        cell.avg_loss_pct += r.drop_rate_pct;
        cell.avg_sessions += static_cast<double>(r.admitted_sessions);
    }

    const std::multiset<std::uint64_t>* reference = nullptr;
    for (std::size_t tier = 0; tier < table.tiers_bps.size(); ++tier) {
        for (std::size_t ti = 0; ti < std::size(kAllTechniques); ++ti) {
            auto it = seeds.find({tier, ti});
            if (it == seeds.end())
                throw std::invalid_argument(
                    "aggregate: incomplete matrix, missing " +
                    technique_token(kAllTechniques[ti]) + " at " +
                    mbps_label(table.tiers_bps[tier]) + " Mbps");
            if (it->second.size() != std::set<std::uint64_t>(it->second.begin(), it->second.end()).size())
                throw std::invalid_argument("aggregate: duplicate seed within a cell");
            if (!reference) reference = &it->second;
            else if (it->second != *reference)
                throw std::invalid_argument("aggregate: seed sets differ between cells");
        }
    }

    table.cells.resize(table.tiers_bps.size(),
                       std::vector<BenchCell>(std::size(kAllTechniques)));
    for (std::size_t tier = 0; tier < table.tiers_bps.size(); ++tier) {
        for (std::size_t ti = 0; ti < std::size(kAllTechniques); ++ti) {
            const auto key = std::make_pair(tier, ti);
            const double n = static_cast<double>(seeds[key].size());
            BenchCell c = sums[key];
            c.avg_throughput_mbps /= n;
            c.avg_loss_pct /= n;
            c.avg_sessions /= n;
            table.cells[tier][ti] = c;
        }
    }
    return table;
}

namespace {

// Strictly best value among the five techniques at one tier.
bool strictly_best(const BenchmarkTable& t, std::size_t tier, Technique who,
                   double BenchCell::*field, bool maximize) {
    const double v = t.at(tier, who).*field;
    for (Technique other : kAllTechniques) {
        if (other == who) continue;
        const double o = t.at(tier, other).*field;
        if (maximize ? !(v > o) : !(v < o)) return false;
    }
    return true;
}

// Rank from the bottom (0 = strictly lowest). Ties count as not-below.
int count_strictly_below(const BenchmarkTable& t, std::size_t tier, Technique who,
                         double BenchCell::*field) {
    const double v = t.at(tier, who).*field;
    int below = 0;
    for (Technique other : kAllTechniques)
        if (other != who && t.at(tier, other).*field < v) ++below;
    return below;
}

}  // namespace

std::vector<TrendResult> trend_check(const BenchmarkTable& table) {
    if (table.tiers_bps.size() < 3)
        throw std::invalid_argument("trend_check: need at least three tiers");
    const std::size_t lo = 0;
    const std::size_t hi = table.tiers_bps.size() - 1;
    const std::size_t mid_hi = table.tiers_bps.size() - 2;

    std::vector<TrendResult> out;
    {
        const bool pass = strictly_best(table, hi, Technique::Red, &BenchCell::avg_throughput_mbps, true) &&
                          strictly_best(table, mid_hi, Technique::Red, &BenchCell::avg_throughput_mbps, true);
        out.push_back({"T1", "RED highest mean throughput at the top two tiers", pass});
    }
    {
        const bool pass = strictly_best(table, lo, Technique::Ecn, &BenchCell::avg_throughput_mbps, true);
        out.push_back({"T2", "ECN highest mean throughput at the lowest tier", pass});
    }
    {
        bool pass = true;
        for (std::size_t tier = 0; tier < table.tiers_bps.size(); ++tier)
            pass = pass && count_strictly_below(table, tier, Technique::Tb,
                                                &BenchCell::avg_throughput_mbps) <= 1;
        out.push_back({"T3", "TB in the bottom two of mean throughput at every tier", pass});
    }
    {
        bool pass = strictly_best(table, hi, Technique::Ab, &BenchCell::avg_sessions, true);
        for (std::size_t tier = 0; tier < table.tiers_bps.size(); ++tier)
            pass = pass && strictly_best(table, tier, Technique::Tb, &BenchCell::avg_sessions, false);
        out.push_back({"T4", "AB admits most sessions at the top tier; TB fewest at every tier", pass});
    }
    {
        const bool pass = strictly_best(table, lo, Technique::Red, &BenchCell::avg_loss_pct, false);
        out.push_back({"T5", "RED lowest mean loss ratio at the lowest tier", pass});
    }
    {
        const bool pass = strictly_best(table, hi, Technique::Ab, &BenchCell::avg_loss_pct, false);
        out.push_back({"L500-table", "AB lowest loss at the top tier (table reading)", pass});
    }
    {
        const bool pass = strictly_best(table, hi, Technique::Tb, &BenchCell::avg_loss_pct, false);
        out.push_back({"L500-text", "TB lowest loss at the top tier (prose reading)", pass});
    }
    return out;
}

int count_seed_wins(const std::vector<MetricsRecord>& records, double tier_bps, Technique t,
                    RunMetric metric, bool maximize) {
    auto value = [&](const MetricsRecord& r) {
        switch (metric) {
            case RunMetric::Throughput: return r.throughput_mbps;
            case RunMetric::LossPct: return r.drop_rate_pct;
            case RunMetric::Admitted: return static_cast<double>(r.admitted_sessions);
        }
        return 0.0;
    };
    std::set<std::uint64_t> seeds;
    for (const auto& r : records)
        if (r.bandwidth_bps == tier_bps) seeds.insert(r.seed);

    int wins = 0;
    for (std::uint64_t seed : seeds) {
        bool have_mine = false;
        double mine = 0;
        bool best = true;
        for (const auto& r : records) {
            if (r.bandwidth_bps != tier_bps || r.seed != seed) continue;
            if (r.technique == t) {
                have_mine = true;
                mine = value(r);
            }
        }
        if (!have_mine) continue;
        for (const auto& r : records) {
            if (r.bandwidth_bps != tier_bps || r.seed != seed || r.technique == t) continue;
            const double o = value(r);
            if (maximize ? !(mine > o) : !(mine < o)) best = false;
        }
        if (best) ++wins;
    }
    return wins;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string to_csv(std::vector<MetricsRecord> records) {
    std::sort(records.begin(), records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
        const std::size_t ta = technique_index(a.technique);
        const std::size_t tb = technique_index(b.technique);
        if (ta != tb) return ta < tb;
        if (a.bandwidth_bps != b.bandwidth_bps) return a.bandwidth_bps < b.bandwidth_bps;
        return a.seed < b.seed;
    });
    std::ostringstream out;
    out << "technique,bandwidth_mbps,seed,throughput_mbps,loss_pct,admitted,blocked,terminated\n";
    for (const auto& r : records) {
        out << csv_field(technique_token(r.technique)) << ',' << mbps_label(r.bandwidth_bps) << ','
            << r.seed << ',' << fmt("%.2f", r.throughput_mbps) << ','
            << fmt("%.4f", r.drop_rate_pct) << ',' << r.admitted_sessions << ','
            << r.blocked_sessions << ',' << r.terminated_sessions << '\n';
    }
    return out.str();
}

std::string format_record(const MetricsRecord& r) {
    std::ostringstream out;
    out << technique_label(r.technique) << " @ " << mbps_label(r.bandwidth_bps)
        << " Mbps seed " << r.seed << ": throughput " << fmt("%.2f", r.throughput_mbps)
        << " Mbps, loss " << fmt("%.4f", r.drop_rate_pct) << "% (sent " << r.tsp << ", acked "
        << r.tap << ", lost " << r.lp << "), sessions admitted " << r.admitted_sessions
        << " / blocked " << r.blocked_sessions << " / terminated " << r.terminated_sessions;
    return out.str();
}

std::string format_benchmark_table(const BenchmarkTable& table) {
    std::ostringstream out;
    auto pad = [](std::string s, std::size_t width) {
        while (s.size() < width) s += ' ';
        return s;
    };
    auto block = [&](const char* title, double BenchCell::*field, const char* spec) {
        out << title << '\n';
        out << "  " << pad("TECHNIQUE", 12);
        for (double tier : table.tiers_bps) {
            std::string hdr = mbps_label(tier) + " Mbps";
            out << pad(hdr, 14);
        }
        out << '\n';
        for (Technique t : kAllTechniques) {
            out << "  " << pad(technique_label(t), 12);
            for (std::size_t tier = 0; tier < table.tiers_bps.size(); ++tier)
                out << pad(fmt(spec, table.at(tier, t).*field), 14);
            out << '\n';
        }
    };
    out << "BENCHMARK (mean over seeds)\n";
    block("AVERAGE THROUGHPUT (Mbps)", &BenchCell::avg_throughput_mbps, "%.2f");
    block("AVERAGE PACKET LOSS RATE (%)", &BenchCell::avg_loss_pct, "%.4f");
    block("AVERAGE ADMITTED SESSIONS", &BenchCell::avg_sessions, "%.1f");
    return out.str();
}

}  // namespace pcn
