#include <doctest.h>

#include <algorithm>
#include <random>

#include "pcn/metrics.hpp"
#include "pcn/rng.hpp"

using namespace pcn;

TEST_CASE("throughput evaluates Eq. 7") {
    CHECK(throughput(1040, 1.0) == doctest::Approx(8320.0));
    CHECK(throughput(0, 2.0) == doctest::Approx(0.0));
    CHECK(throughput(1040, 0.5) == doctest::Approx(2 * 8320.0));  // halving RTT doubles it
    CHECK_THROWS_AS(throughput(1040, 0), std::invalid_argument);
    CHECK_THROWS_AS(throughput(1040, -1), std::invalid_argument);
}

TEST_CASE("loss_stats evaluates Eqs. 8-9") {
    {
        auto [lp, dr] = loss_stats(100, 90);
        CHECK(lp == 10);
        CHECK(dr == doctest::Approx(10.0));
    }
    {
        auto [lp, dr] = loss_stats(250, 250);
        CHECK(lp == 0);
        CHECK(dr == doctest::Approx(0.0));
    }
    {
        auto [lp, dr] = loss_stats(0, 0);  // empty-run convention
        CHECK(lp == 0);
        CHECK(dr == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(loss_stats(10, 11), std::invalid_argument);
}

namespace {

MetricsRecord rec(Technique t, double bw_mbps, std::uint64_t seed, double tput, double loss,
                  int admitted) {
    MetricsRecord r;
    r.technique = t;
    r.bandwidth_bps = bw_mbps * 1e6;
    r.seed = seed;
    r.throughput_mbps = tput;
    r.drop_rate_pct = loss;
    r.admitted_sessions = admitted;
    r.tsp = 1000;
    r.tap = 1000 - static_cast<std::uint64_t>(loss * 10);
    r.lp = r.tsp - r.tap;
    return r;
}

// The published comparison table, three tiers by five techniques:
// throughput / loss / admitted sessions.
std::vector<MetricsRecord> paper_table_records() {
    struct Row {
        Technique t;
        double tput[3];
        double loss[3];
        int sessions[3];
    };
    const Row rows[] = {
        {Technique::Ab, {29, 31.75, 33.5}, {3.38, 2.4, 1.85}, {55, 63, 71}},
        {Technique::Ecn, {34, 33.75, 34.5}, {3, 2.35, 2.18}, {56, 62, 66}},
        {Technique::Tb, {30.25, 31.25, 31.25}, {3.1, 2.38, 2.38}, {53, 55, 64}},
        {Technique::Bm, {31, 35.25, 35.5}, {2.95, 2.38, 2.3}, {58, 63, 65}},
        {Technique::Red, {33, 39.5, 38.75}, {2.75, 2.48, 2.23}, {58, 62, 65}},
    };
    const double tiers[3] = {300, 400, 500};
    std::vector<MetricsRecord> out;
    for (const Row& row : rows)
        for (int i = 0; i < 3; ++i)
            out.push_back(rec(row.t, tiers[i], 1, row.tput[i], row.loss[i], row.sessions[i]));
    return out;
}

}  // namespace

TEST_CASE("aggregate means, ordering and completeness checks") {
    SUBCASE("a single seed per cell reproduces the records") {
        const auto records = paper_table_records();
        const BenchmarkTable table = aggregate(records);
        REQUIRE(table.tiers_bps.size() == 3);
        CHECK(table.at(0, Technique::Ecn).avg_throughput_mbps == doctest::Approx(34));
        CHECK(table.at(2, Technique::Red).avg_throughput_mbps == doctest::Approx(38.75));
        CHECK(table.at(2, Technique::Ab).avg_sessions == doctest::Approx(71));
    }

    SUBCASE("two seeds average arithmetically") {
        std::vector<MetricsRecord> records;
        for (Technique t : kAllTechniques) {
            records.push_back(rec(t, 30, 1, 10, 1, 5));
            records.push_back(rec(t, 30, 2, 20, 3, 7));
            records.push_back(rec(t, 40, 1, 10, 1, 5));
            records.push_back(rec(t, 40, 2, 20, 3, 7));
            records.push_back(rec(t, 50, 1, 10, 1, 5));
            records.push_back(rec(t, 50, 2, 20, 3, 7));
        }
        const BenchmarkTable table = aggregate(records);
        CHECK(table.at(0, Technique::Red).avg_throughput_mbps == doctest::Approx(15));
        CHECK(table.at(0, Technique::Red).avg_loss_pct == doctest::Approx(2));
        CHECK(table.at(0, Technique::Red).avg_sessions == doctest::Approx(6));
    }

    SUBCASE("shuffled input gives an identical table") {
        auto records = paper_table_records();
        const BenchmarkTable before = aggregate(records);
        std::mt19937 g(4);
        std::shuffle(records.begin(), records.end(), g);
        const BenchmarkTable after = aggregate(records);
        for (std::size_t tier = 0; tier < 3; ++tier)
            for (Technique t : kAllTechniques) {
                CHECK(before.at(tier, t).avg_throughput_mbps ==
                      after.at(tier, t).avg_throughput_mbps);
                CHECK(before.at(tier, t).avg_sessions == after.at(tier, t).avg_sessions);
            }
    }

    SUBCASE("incomplete matrices are rejected") {
        auto records = paper_table_records();
        records.pop_back();  // lose RED @ 500
        CHECK_THROWS_AS(aggregate(records), std::invalid_argument);

        records = paper_table_records();
        records.push_back(rec(Technique::Red, 500, 2, 38, 2.2, 64));  // seed set mismatch
        CHECK_THROWS_AS(aggregate(records), std::invalid_argument);

        CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
    }
}

TEST_CASE("trend_check against the published table") {
    const BenchmarkTable table = aggregate(paper_table_records());
    const auto trends = trend_check(table);
    auto get = [&](const std::string& id) {
        for (const auto& t : trends)
            if (t.id == id) return t.pass;
        FAIL("missing trend ", id);
        return false;
    };
    CHECK(get("T1"));
    CHECK(get("T2"));
    CHECK(get("T3"));
    CHECK(get("T4"));
    CHECK(get("T5"));
    // The top-tier loss row contradiction: the table reading passes, the
    // prose reading fails.
    CHECK(get("L500-table"));
    CHECK_FALSE(get("L500-text"));
}

TEST_CASE("trend_check with all-equal cells fails every ordinal claim") {
    std::vector<MetricsRecord> records;
    for (Technique t : kAllTechniques)
        for (double bw : {30.0, 40.0, 50.0}) records.push_back(rec(t, bw, 1, 30, 2, 60));
    const auto trends = trend_check(aggregate(records));
    for (const auto& tr : trends) {
        if (tr.id == "T3") {
            CHECK(tr.pass);  // bottom-two is a rank bound, ties leave TB in range
        } else {
            CHECK_FALSE(tr.pass);
        }
    }
}

TEST_CASE("count_seed_wins counts strict per-seed winners") {
    std::vector<MetricsRecord> records;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        for (Technique t : kAllTechniques) {
            double tput = t == Technique::Red ? 35 : 30;
            if (seed == 5 && t == Technique::Ecn) tput = 40;  // ECN steals one seed
            records.push_back(rec(t, 30, seed, tput, 2, 50));
        }
    CHECK(count_seed_wins(records, 30e6, Technique::Red, RunMetric::Throughput, true) == 4);
    CHECK(count_seed_wins(records, 30e6, Technique::Ecn, RunMetric::Throughput, true) == 1);
    CHECK(count_seed_wins(records, 30e6, Technique::Tb, RunMetric::Throughput, true) == 0);
}

TEST_CASE("csv output: header, order, quoting") {
    std::vector<MetricsRecord> records;
    records.push_back(rec(Technique::Red, 40, 2, 31.5, 2.25, 60));
    records.push_back(rec(Technique::Ab, 30, 1, 29.0, 3.0, 55));
    records.push_back(rec(Technique::Red, 40, 1, 30.0, 2.5, 61));
    const std::string csv = to_csv(records);

    const std::string header =
        "technique,bandwidth_mbps,seed,throughput_mbps,loss_pct,admitted,blocked,terminated";
    CHECK(csv.substr(0, header.size()) == header);
    // ab precedes red; within red, seed 1 precedes seed 2.
    const auto ab_pos = csv.find("\nab,");
    const auto red1_pos = csv.find("\nred,40,1");
    const auto red2_pos = csv.find("\nred,40,2");
    REQUIRE(ab_pos != std::string::npos);
    REQUIRE(red1_pos != std::string::npos);
    REQUIRE(red2_pos != std::string::npos);
    CHECK(ab_pos < red1_pos);
    CHECK(red1_pos < red2_pos);
    CHECK(csv.find("31.50") != std::string::npos);  // 2-decimal throughput

    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("with,comma") == "\"with,comma\"");
    CHECK(csv_field("with\"quote") == "\"with\"\"quote\"");
}

TEST_CASE("format_benchmark_table renders one block per factor") {
    const std::string text = format_benchmark_table(aggregate(paper_table_records()));
    CHECK(text.find("AVERAGE THROUGHPUT") != std::string::npos);
    CHECK(text.find("AVERAGE PACKET LOSS RATE") != std::string::npos);
    CHECK(text.find("AVERAGE ADMITTED SESSIONS") != std::string::npos);
    CHECK(text.find("RED") != std::string::npos);
    CHECK(text.find("38.75") != std::string::npos);
}
