#ifndef PCN_SIM_HPP
#define PCN_SIM_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pcn/core.hpp"
#include "pcn/metrics.hpp"
#include "pcn/scenario.hpp"
#include "pcn/time.hpp"

namespace pcn {

struct Topology {
    std::vector<LinkConfig> links;  // equal capacity shares of the scenario bandwidth
};

Topology build_topology(const ScenarioConfig& cfg);

// Eq. 10 window cap: floor(2*B*DP / (8*packet_size)), at least 1 packet.
int optimal_window_packets(double b_bps, double dp_s, int packet_size_bytes);

enum class SenderSignal : std::uint8_t { Ack, MarkEcho, Loss };

struct SenderModel {
    double window = 2;        // packets, >= 1
    double window_cap = 64;   // Eq. 10 cap
    int in_flight = 0;
    SimTime recover_until{};  // one multiplicative decrease per RTT
};

// Ack: window += 1/window (capped). MarkEcho/Loss: window halves, floored at 1.
void aimd_on_feedback(SenderModel& s, SenderSignal sig);

// Remainder-carrying CBR spacing so the long-run rate is exactly rate_pps.
struct CbrPacer {
    std::int64_t carry = 0;
};

// Pause window [k*interval, k*interval+len) containing t, if any (k >= 1).
std::optional<std::pair<SimTime, SimTime>> pause_window_at(const ScenarioConfig& cfg, SimTime t);

// Next departure after `now`; departures landing inside a pause window are
// deferred to the window's end.
SimTime cbr_next_departure(CbrPacer& pacer, SimTime now, int rate_pps,
                           const ScenarioConfig& cfg);

// Side counters for tuning and tests; not part of the benchmark output.
struct RunDiagnostics {
    std::uint64_t marks_seen_at_egress = 0;
    std::uint64_t drops_meter = 0;     // meter verdict Drop (ECN on Not-ECT)
    std::uint64_t drops_overflow = 0;  // FIFO tail drop
    std::uint64_t drops_ab = 0;        // AB shared buffer full
    double final_cle = 0;
    double mean_utilization = 0;       // busy fraction over links
    std::uint64_t sends_connections = 0;
    std::uint64_t sends_sessions = 0;
    std::uint64_t events_processed = 0;
};

// Executes one scenario to completion (duration elapses, queues drain).
// Deterministic for a given (cfg, seed). Throws on kernel errors and on a
// conservation failure.
MetricsRecord run(const ScenarioConfig& cfg, RunDiagnostics* diag = nullptr);

}  // namespace pcn

#endif
