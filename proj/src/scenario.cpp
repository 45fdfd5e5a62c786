#include "pcn/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pcn {

std::string technique_token(Technique t) {
    switch (t) {
        case Technique::Ab: return "ab";
        case Technique::Ecn: return "ecn";
        case Technique::Tb: return "tb";
        case Technique::Bm: return "bm";
        case Technique::Red: return "red";
    }
    return "?";
}

std::string technique_label(Technique t) {
    std::string s = technique_token(t);
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

Technique technique_from_token(const std::string& token) {
    std::string t = token;
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (Technique tech : kAllTechniques)
        if (technique_token(tech) == t) return tech;
    throw std::invalid_argument("unknown technique '" + token +
                                "' (expected one of: red, ecn, tb, bm, ab)");
}

std::string mark_echo_token(MarkEchoMode m) {
    switch (m) {
        case MarkEchoMode::Ce: return "ce";
        case MarkEchoMode::Pcn: return "pcn";
        case MarkEchoMode::None: return "none";
    }
    return "?";
}

static MarkEchoMode mark_echo_from_token(const std::string& token) {
    if (token == "ce") return MarkEchoMode::Ce;
    if (token == "pcn") return MarkEchoMode::Pcn;
    if (token == "none") return MarkEchoMode::None;
    throw std::invalid_argument("unknown mark_echo '" + token + "' (expected ce, pcn or none)");
}

double parse_bandwidth(const std::string& text) {
    std::string s = text;
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    double scale = 1.0;
    for (auto& [suffix, mult] : {std::pair<const char*, double>{"gbps", 1e9},
                                 {"mbps", 1e6},
                                 {"kbps", 1e3},
                                 {"bps", 1.0}}) {
        const std::size_t n = std::string(suffix).size();
        if (s.size() > n && s.compare(s.size() - n, n, suffix) == 0) {
            scale = mult;
            s.resize(s.size() - n);
            break;
        }
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing junk");
        if (!(v > 0)) throw std::invalid_argument("non-positive");
        return v * scale;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad bandwidth '" + text +
                                    "' (examples: 30mbps, 512kbps, 30000000)");
    }
}

void ScenarioConfig::validate() const {
    if (!(bandwidth_bps > 0)) throw std::invalid_argument("bandwidth_bps must be positive");
    if (n_links <= 0) throw std::invalid_argument("n_links must be positive");
    if (n_connections < 0) throw std::invalid_argument("n_connections must be non-negative");
    if (packet_rate_pps <= 0) throw std::invalid_argument("packet_rate must be positive");
    if (packet_size_bytes < 40) throw std::invalid_argument("packet_size must be at least 40");
    if (!(duration_s >= 0)) throw std::invalid_argument("duration_s must be non-negative");
    if (pause_interval_s < 0 || pause_len_s < 0)
        throw std::invalid_argument("pause values must be non-negative");
    if (!(ar_frac > 0 && ar_frac <= sr_frac && sr_frac <= 1.0))
        throw std::invalid_argument("need 0 < ar_frac <= sr_frac <= 1");
    if (!(or_frac >= ar_frac && or_frac <= 1.0))
        throw std::invalid_argument("need ar_frac <= or_frac <= 1");
    if (!(red_wq > 0 && red_wq <= 1)) throw std::invalid_argument("red_wq must be in (0,1]");
    if (!(red_min_thr > 0 && red_min_thr < red_max_thr))
        throw std::invalid_argument("need 0 < red_min_thr < red_max_thr");
    if (!(red_max_p > 0 && red_max_p <= 1)) throw std::invalid_argument("red_max_p in (0,1]");
    if (red_thr_ref_bps < 0) throw std::invalid_argument("red_thr_ref_bps must be >= 0");
    if (!(tb_rate_frac > 0 && tb_bucket_s > 0))
        throw std::invalid_argument("token bucket rate/depth must be positive");
    if (tb_mark_frac < 0 || tb_mark_frac > 1)
        throw std::invalid_argument("tb_mark_frac must be in [0,1]");
    if (!(bm_mi_ms > 0 && bm_bthr_frac > 0))
        throw std::invalid_argument("bandwidth meter parameters must be positive");
    if (buffer_pkts <= 0 || ab_buffer_pkts <= 0)
        throw std::invalid_argument("buffer sizes must be positive");
    if (!(ab_mi_ms > 0)) throw std::invalid_argument("ab_mi_ms must be positive");
    if (!(cle_w > 0 && cle_w < 1)) throw std::invalid_argument("cle_w must be in (0,1)");
    if (!(admit_threshold > 0 && admit_threshold < 1))
        throw std::invalid_argument("admit_threshold must be in (0,1)");
    if (!(signal_interval_ms > 0 && signal_delay_ms >= 0))
        throw std::invalid_argument("signal timing must be positive");
    if (!(session_mean_interarrival_s > 0))
        throw std::invalid_argument("session_mean_interarrival_s must be positive");
    if (!(term_check_interval_ms > 0))
        throw std::invalid_argument("term_check_interval_ms must be positive");
    if (!(prop_delay_ms >= 0)) throw std::invalid_argument("prop_delay_ms must be non-negative");
    if (!(loss_feedback_ms >= 0))
        throw std::invalid_argument("loss_feedback_ms must be non-negative");
    if (!(window_dp_s > 0)) throw std::invalid_argument("window_dp_s must be positive");
    if (!(pcn_echo_guard_rtt >= 1.0))
        throw std::invalid_argument("pcn_echo_guard_rtt must be at least 1");
}

namespace {

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

double parse_double(const std::string& v) {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("bad number '" + v + "'");
    return d;
}

long long parse_int(const std::string& v) {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("bad integer '" + v + "'");
    return d;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::invalid_argument("bad boolean '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"technique", [](ScenarioConfig& c, const std::string& v) { c.technique = technique_from_token(v); }},
        {"bandwidth_bps", [](ScenarioConfig& c, const std::string& v) { c.bandwidth_bps = parse_bandwidth(v); }},
        {"n_links", [](ScenarioConfig& c, const std::string& v) { c.n_links = static_cast<int>(parse_int(v)); }},
        {"n_connections", [](ScenarioConfig& c, const std::string& v) { c.n_connections = static_cast<int>(parse_int(v)); }},
        {"packet_rate", [](ScenarioConfig& c, const std::string& v) { c.packet_rate_pps = static_cast<int>(parse_int(v)); }},
        {"packet_size", [](ScenarioConfig& c, const std::string& v) { c.packet_size_bytes = static_cast<int>(parse_int(v)); }},
        {"duration_s", [](ScenarioConfig& c, const std::string& v) { c.duration_s = parse_double(v); }},
        {"pause_interval_s", [](ScenarioConfig& c, const std::string& v) { c.pause_interval_s = parse_double(v); }},
        {"pause_len_s", [](ScenarioConfig& c, const std::string& v) { c.pause_len_s = parse_double(v); }},
        {"seed", [](ScenarioConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_int(v)); }},
        {"ar_frac", [](ScenarioConfig& c, const std::string& v) { c.ar_frac = parse_double(v); }},
        {"sr_frac", [](ScenarioConfig& c, const std::string& v) { c.sr_frac = parse_double(v); }},
        {"or_frac", [](ScenarioConfig& c, const std::string& v) { c.or_frac = parse_double(v); }},
        {"red_wq", [](ScenarioConfig& c, const std::string& v) { c.red_wq = parse_double(v); }},
        {"red_min_thr", [](ScenarioConfig& c, const std::string& v) { c.red_min_thr = parse_double(v); }},
        {"red_max_thr", [](ScenarioConfig& c, const std::string& v) { c.red_max_thr = parse_double(v); }},
        {"red_max_p", [](ScenarioConfig& c, const std::string& v) { c.red_max_p = parse_double(v); }},
        {"red_thr_ref_bps", [](ScenarioConfig& c, const std::string& v) { c.red_thr_ref_bps = v == "0" ? 0.0 : parse_bandwidth(v); }},
        {"tb_rate_frac", [](ScenarioConfig& c, const std::string& v) { c.tb_rate_frac = parse_double(v); }},
        {"tb_bucket_s", [](ScenarioConfig& c, const std::string& v) { c.tb_bucket_s = parse_double(v); }},
        {"tb_mark_frac", [](ScenarioConfig& c, const std::string& v) { c.tb_mark_frac = parse_double(v); }},
        {"bm_mi_ms", [](ScenarioConfig& c, const std::string& v) { c.bm_mi_ms = parse_double(v); }},
        {"bm_bthr_frac", [](ScenarioConfig& c, const std::string& v) { c.bm_bthr_frac = parse_double(v); }},
        {"buffer_pkts", [](ScenarioConfig& c, const std::string& v) { c.buffer_pkts = static_cast<int>(parse_int(v)); }},
        {"ab_buffer_pkts", [](ScenarioConfig& c, const std::string& v) { c.ab_buffer_pkts = static_cast<int>(parse_int(v)); }},
        {"ab_mi_ms", [](ScenarioConfig& c, const std::string& v) { c.ab_mi_ms = parse_double(v); }},
        {"cle_w", [](ScenarioConfig& c, const std::string& v) { c.cle_w = parse_double(v); }},
        {"admit_threshold", [](ScenarioConfig& c, const std::string& v) { c.admit_threshold = parse_double(v); }},
        {"signal_interval_ms", [](ScenarioConfig& c, const std::string& v) { c.signal_interval_ms = parse_double(v); }},
        {"signal_delay_ms", [](ScenarioConfig& c, const std::string& v) { c.signal_delay_ms = parse_double(v); }},
        {"session_mean_interarrival_s", [](ScenarioConfig& c, const std::string& v) { c.session_mean_interarrival_s = parse_double(v); }},
        {"termination_enabled", [](ScenarioConfig& c, const std::string& v) { c.termination_enabled = parse_bool(v); }},
        {"term_check_interval_ms", [](ScenarioConfig& c, const std::string& v) { c.term_check_interval_ms = parse_double(v); }},
        {"prop_delay_ms", [](ScenarioConfig& c, const std::string& v) { c.prop_delay_ms = parse_double(v); }},
        {"loss_feedback_ms", [](ScenarioConfig& c, const std::string& v) { c.loss_feedback_ms = parse_double(v); }},
        {"window_dp_s", [](ScenarioConfig& c, const std::string& v) { c.window_dp_s = parse_double(v); }},
        {"mark_echo", [](ScenarioConfig& c, const std::string& v) { c.mark_echo = mark_echo_from_token(v); }},
        {"pcn_echo_guard_rtt", [](ScenarioConfig& c, const std::string& v) { c.pcn_echo_guard_rtt = parse_double(v); }},
    };
    return m;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    auto it = setters().find(key);
    if (it == setters().end())
        throw std::invalid_argument("unknown config key '" + key + "'");
    it->second(cfg, value);
}

void apply_override_expr(ScenarioConfig& cfg, const std::string& key_eq_value) {
    const std::size_t eq = key_eq_value.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("bad override '" + key_eq_value + "' (expected key=value)");
    apply_override(cfg, trim(key_eq_value.substr(0, eq)), trim(key_eq_value.substr(eq + 1)));
}

ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            apply_override_expr(base, line);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ScenarioConfig parse_config_file(const std::string& path, ScenarioConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), base);
}

std::string format_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(15);
        s << v;
        return s.str();
    };
    out << "technique=" << technique_token(cfg.technique) << '\n';
    out << "bandwidth_bps=" << num(cfg.bandwidth_bps) << '\n';
    out << "n_links=" << cfg.n_links << '\n';
    out << "n_connections=" << cfg.n_connections << '\n';
    out << "packet_rate=" << cfg.packet_rate_pps << '\n';
    out << "packet_size=" << cfg.packet_size_bytes << '\n';
    out << "duration_s=" << num(cfg.duration_s) << '\n';
    out << "pause_interval_s=" << num(cfg.pause_interval_s) << '\n';
    out << "pause_len_s=" << num(cfg.pause_len_s) << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "ar_frac=" << num(cfg.ar_frac) << '\n';
    out << "sr_frac=" << num(cfg.sr_frac) << '\n';
    out << "or_frac=" << num(cfg.or_frac) << '\n';
    out << "red_wq=" << num(cfg.red_wq) << '\n';
    out << "red_min_thr=" << num(cfg.red_min_thr) << '\n';
    out << "red_max_thr=" << num(cfg.red_max_thr) << '\n';
    out << "red_max_p=" << num(cfg.red_max_p) << '\n';
    out << "red_thr_ref_bps=" << num(cfg.red_thr_ref_bps) << '\n';
    out << "tb_rate_frac=" << num(cfg.tb_rate_frac) << '\n';
    out << "tb_bucket_s=" << num(cfg.tb_bucket_s) << '\n';
    out << "tb_mark_frac=" << num(cfg.tb_mark_frac) << '\n';
    out << "bm_mi_ms=" << num(cfg.bm_mi_ms) << '\n';
    out << "bm_bthr_frac=" << num(cfg.bm_bthr_frac) << '\n';
    out << "buffer_pkts=" << cfg.buffer_pkts << '\n';
    out << "ab_buffer_pkts=" << cfg.ab_buffer_pkts << '\n';
    out << "ab_mi_ms=" << num(cfg.ab_mi_ms) << '\n';
    out << "cle_w=" << num(cfg.cle_w) << '\n';
    out << "admit_threshold=" << num(cfg.admit_threshold) << '\n';
    out << "signal_interval_ms=" << num(cfg.signal_interval_ms) << '\n';
    out << "signal_delay_ms=" << num(cfg.signal_delay_ms) << '\n';
    out << "session_mean_interarrival_s=" << num(cfg.session_mean_interarrival_s) << '\n';
    out << "termination_enabled=" << (cfg.termination_enabled ? "true" : "false") << '\n';
    out << "term_check_interval_ms=" << num(cfg.term_check_interval_ms) << '\n';
    out << "prop_delay_ms=" << num(cfg.prop_delay_ms) << '\n';
    out << "loss_feedback_ms=" << num(cfg.loss_feedback_ms) << '\n';
    out << "window_dp_s=" << num(cfg.window_dp_s) << '\n';
    out << "mark_echo=" << mark_echo_token(cfg.mark_echo) << '\n';
    out << "pcn_echo_guard_rtt=" << num(cfg.pcn_echo_guard_rtt) << '\n';
    return out.str();
}

}  // namespace pcn
