// pcnsim: run one PCN metering scenario, the full benchmark matrix, or just
// validate a configuration.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcn/bench.hpp"
#include "pcn/metrics.hpp"
#include "pcn/scenario.hpp"
#include "pcn/sim.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string technique;
    std::string bandwidth;
    double duration = -1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--config", o.config_path, "scenario file (key=value lines, # comments)");
    app->add_option("--technique", o.technique, "red, ecn, tb, bm or ab");
    app->add_option("--bandwidth", o.bandwidth, "domain bandwidth, e.g. 30mbps or 30000000");
    app->add_option("--duration", o.duration, "simulated seconds");
    app->add_option("--override", o.overrides, "config override key=value (repeatable)")
        ->take_all();
}

pcn::ScenarioConfig resolve(const CommonOpts& o) {
    pcn::ScenarioConfig cfg;
    if (!o.config_path.empty()) cfg = pcn::parse_config_file(o.config_path, cfg);
    if (!o.technique.empty()) cfg.technique = pcn::technique_from_token(o.technique);
    if (!o.bandwidth.empty()) cfg.bandwidth_bps = pcn::parse_bandwidth(o.bandwidth);
    if (o.duration >= 0) cfg.duration_s = o.duration;
    for (const auto& ov : o.overrides) pcn::apply_override_expr(cfg, ov);
    cfg.validate();
    return cfg;
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCN domain simulator and metering benchmark"};
    app.require_subcommand(1);

    CommonOpts run_opts, bench_opts, val_opts;
    std::uint64_t run_seed = 1;
    std::string run_output = "table";
    std::string run_out_path;

    std::vector<std::uint64_t> bench_seeds = {1, 2, 3, 4, 5};
    std::vector<std::string> bench_tiers;
    std::string bench_output = "both";
    std::string bench_out_path;
    bool strict = false;
    int bench_threads = 0;

    bool run_debug = false;
    auto* run_cmd = app.add_subcommand("run", "execute a single scenario");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--seed", run_seed, "PRNG seed");
    run_cmd->add_option("--output", run_output, "csv, table or both")
        ->check(CLI::IsMember({"csv", "table", "both"}));
    run_cmd->add_option("--out", run_out_path, "write CSV here instead of stdout");
    run_cmd->add_flag("--debug", run_debug, "print simulator diagnostics");

    auto* bench_cmd = app.add_subcommand("bench", "run the technique x tier x seed matrix");
    add_common(bench_cmd, bench_opts);
    bench_cmd->add_option("--seeds", bench_seeds, "seed list (default 1..5)")->delimiter(',');
    bench_cmd->add_option("--tiers", bench_tiers, "bandwidth tiers (default 30,40,50 Mbps)")
        ->delimiter(',');
    bench_cmd->add_option("--output", bench_output, "csv, table or both")
        ->check(CLI::IsMember({"csv", "table", "both"}));
    bench_cmd->add_option("--out", bench_out_path, "write CSV here instead of stdout");
    bench_cmd->add_flag("--strict", strict, "exit nonzero when a trend check fails");
    bench_cmd->add_option("--threads", bench_threads, "max parallel scenarios");

    auto* val_cmd = app.add_subcommand("validate", "parse and echo the resolved scenario");
    add_common(val_cmd, val_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            pcn::ScenarioConfig cfg = resolve(run_opts);
            cfg.seed = run_seed;
            pcn::RunDiagnostics diag;
            const pcn::MetricsRecord rec = pcn::run(cfg, &diag);
            if (run_output == "table" || run_output == "both")
                std::cout << pcn::format_record(rec) << '\n';
            if (run_debug) {
                std::cout << "diag: marks_at_egress=" << diag.marks_seen_at_egress
                          << " drops_meter=" << diag.drops_meter
                          << " drops_overflow=" << diag.drops_overflow
                          << " drops_ab=" << diag.drops_ab << " final_cle=" << diag.final_cle
                          << " util=" << diag.mean_utilization
                          << " conn_pkts=" << diag.sends_connections
                          << " sess_pkts=" << diag.sends_sessions
                          << " events=" << diag.events_processed << '\n';
            }
            if (run_output == "csv" || run_output == "both")
                write_out(run_out_path, pcn::to_csv({rec}));
            return 0;
        }
        if (bench_cmd->parsed()) {
            pcn::BenchConfig bc;
            bc.base = resolve(bench_opts);
            bc.seeds = bench_seeds;
            bc.max_threads = bench_threads;
            if (!bench_tiers.empty()) {
                bc.tiers_bps.clear();
                for (const auto& t : bench_tiers) bc.tiers_bps.push_back(pcn::parse_bandwidth(t));
            }
            const pcn::BenchOutput out = pcn::run_bench(bc);
            if (bench_output == "table" || bench_output == "both") std::cout << out.report;
            if (bench_output == "csv" || bench_output == "both")
                write_out(bench_out_path, pcn::to_csv(out.records));
            if (strict)
                for (const auto& tr : out.trends)
                    if (!tr.pass) return 1;
            return 0;
        }
        if (val_cmd->parsed()) {
            std::cout << pcn::format_config(resolve(val_opts));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "pcnsim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
