#ifndef PCN_SCENARIO_HPP
#define PCN_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pcn {

enum class Technique : std::uint8_t { Ab, Ecn, Tb, Bm, Red };

// Benchmark/table presentation order.
inline constexpr Technique kAllTechniques[] = {Technique::Ab, Technique::Ecn, Technique::Tb,
                                               Technique::Bm, Technique::Red};

std::string technique_token(Technique t);   // "ab", "ecn", "tb", "bm", "red"
std::string technique_label(Technique t);   // "AB", "ECN", ...
Technique technique_from_token(const std::string& token);  // throws, names legal values

// Which delivered congestion signals the receiver echoes back to window-based
// senders. "ce" echoes only the CE codepoint; "pcn" additionally echoes
// AQM-origin PCN marks (the RED technique). Rate-meter marks and the
// additional buffer's degraded scheduling class inform only the egress
// estimator, never the transport. "none" disables mark echo entirely.
enum class MarkEchoMode : std::uint8_t { Ce, Pcn, None };

// Desk-scale defaults: the source scenario's 300/400/500 Mbps tiers scaled
// down 10x so the full benchmark matrix runs in seconds. Everything here can
// be set from a config file or --override key=value.
struct ScenarioConfig {
    Technique technique = Technique::Red;
    double bandwidth_bps = 30e6;
    int n_links = 5;
    int n_connections = 10;
    int packet_rate_pps = 15;        // per-flow CBR rate
    int packet_size_bytes = 1040;    // including 40 B header
    double duration_s = 60;
    double pause_interval_s = 30;    // 0 disables the generator pause
    double pause_len_s = 4;
    std::uint64_t seed = 1;

    // Per-link thresholds as capacity fractions.
    double ar_frac = 0.7;
    double sr_frac = 0.9;
    double or_frac = 1.0;

    // RED / ECN. Thresholds are packet counts at red_thr_ref_bps of link
    // capacity and scale linearly with the link rate (so the queueing-delay
    // trigger point is rate-independent); 0 disables the scaling.
    double red_wq = 0.01;
    double red_min_thr = 5;
    double red_max_thr = 15;
    double red_max_p = 0.1;
    double red_thr_ref_bps = 6e6;

    // Token bucket: fill rate and bucket depth as fractions of link capacity,
    // mark threshold as a fraction of the bucket.
    double tb_rate_frac = 0.6;       // R = frac * capacity (as bytes/s)
    double tb_bucket_s = 0.1;        // BC = R * this many seconds
    double tb_mark_frac = 0.7;       // threshold = frac * BC

    // Bandwidth metering
    double bm_mi_ms = 100;
    double bm_bthr_frac = 0.66;      // B_Thr = frac * capacity

    // Queues
    int buffer_pkts = 30;            // FIFO techniques
    int ab_buffer_pkts = 30;         // AB shared dual-queue buffer
    double ab_mi_ms = 800;

    // Control plane
    double cle_w = 0.9;
    double admit_threshold = 0.14;
    double signal_interval_ms = 5;
    double signal_delay_ms = 5;
    double session_mean_interarrival_s = 0.21;
    bool termination_enabled = true;
    double term_check_interval_ms = 100;

    // Path / transport
    double prop_delay_ms = 10;
    double loss_feedback_ms = 10;
    double window_dp_s = 0.03;       // DP for the optimal-window cap
    MarkEchoMode mark_echo = MarkEchoMode::Pcn;
    // Senders treat domain-level pre-congestion marks as advisory and spread
    // the multiplicative decrease over this many reaction windows; CE and
    // loss always react once per window.
    double pcn_echo_guard_rtt = 4.0;

    void validate() const;  // throws std::invalid_argument
};

// Flat key=value scenario files: one key per line, '#' starts a comment.
ScenarioConfig parse_config_file(const std::string& path, ScenarioConfig base = {});
ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base = {});

// Applies one override; throws on unknown keys or malformed values.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);
void apply_override_expr(ScenarioConfig& cfg, const std::string& key_eq_value);

// Resolved key=value echo, parseable by parse_config_text.
std::string format_config(const ScenarioConfig& cfg);

// "30mbps", "512kbps", "1.5gbps" or a plain bits/second number.
double parse_bandwidth(const std::string& text);

std::string mark_echo_token(MarkEchoMode m);

}  // namespace pcn

#endif
