#ifndef PCN_METERING_HPP
#define PCN_METERING_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <utility>

#include "pcn/core.hpp"
#include "pcn/rng.hpp"
#include "pcn/time.hpp"

namespace pcn {

// ---------------------------------------------------------------------------
// RED

struct RedParams {
    double w_q = 0.002;     // EWMA weight, (0,1]
    double min_thr = 5;     // packets
    double max_thr = 15;    // packets
    double max_p = 0.1;     // (0,1]
    void validate() const;
};

struct RedState {
    RedParams params;
    double avg = 0;         // average queue size, packets
    long count = -1;        // packets since last mark; -1 outside the probabilistic regime
};

// avg <- (1 - w_q)*avg + w_q*q
double red_update_avg(RedState& st, double instantaneous_queue);

// Marking probability for min_thr <= avg < max_thr:
//   P_p = max_p*(avg - min_thr)/(max_thr - min_thr)
//   P_A = P_p / (1 - count*P_p), clamped to 1 once count*P_p >= 1.
double red_marking_probability(const RedState& st);

MeterDecision red_on_arrival(RedState& st, const Packet& pkt, std::size_t queue_len, Rng& rng);

// RED plus codepoint handling. On a RED Mark verdict: ECN-capable packets get
// CE and are marked; Not-ECT packets are dropped (a mark is unrepresentable);
// packets already CE stay marked.
MeterDecision ecn_on_arrival(RedState& st, Packet& pkt, std::size_t queue_len, Rng& rng);

// ---------------------------------------------------------------------------
// Token bucket

struct TokenBucketParams {
    double capacity_bytes = 0;        // BC
    double fill_rate_Bps = 0;         // R, bytes/second
    double mark_threshold_bytes = 0;  // mark when tokens fall below this
    // Burst length L and generating rate G appear in the source algorithm but
    // have no consistent runtime role; kept as documentation only.
    double burst_length_s = 0;
    double generating_rate_Bps = 0;
    void validate() const;
};

struct TokenBucketState {
    TokenBucketParams params;
    double tokens = 0;
    SimTime last_refill{};
};

// tokens <- min(BC, tokens + R*(now - last_refill)); lazy continuous refill.
void tb_refill(TokenBucketState& st, SimTime now);

// Refill, debit the packet (floored at zero), Mark when tokens < threshold.
MeterDecision tb_on_arrival(TokenBucketState& st, const Packet& pkt, SimTime now);

// ---------------------------------------------------------------------------
// Bandwidth metering

struct BandwidthMeterState {
    SimTime mi = SimTime::from_usec(100'000);  // measurement interval
    double threshold_bps = 0;                  // B_Thr
    std::deque<std::pair<SimTime, std::uint32_t>> window;  // (timestamp, bytes)
    std::uint64_t window_bytes = 0;            // running sum of window entries
};

void bm_record(BandwidthMeterState& st, SimTime now, std::uint32_t bytes);

// Evicts entries outside the half-open window (now - mi, now], then returns
// B = sum(bytes)*8 / mi in bits/second.
double bm_measure(BandwidthMeterState& st, SimTime now);

// Records the arrival, then Mark iff B > B_Thr.
MeterDecision bm_on_arrival(BandwidthMeterState& st, const Packet& pkt, SimTime now);

// ---------------------------------------------------------------------------
// Additional buffer

// Tr = (Ar + Or)/2; requires Ar <= Or.
double ab_compute_threshold(double ar_bps, double or_bps);

// (Wd, Wb) = (1 - Tr/Or, Tr/Or); requires 0 < Tr <= Or.
std::pair<double, double> ab_weights(double tr_bps, double or_bps);

struct AbParams {
    double threshold_rate_bps = 0;  // Tr
    double w_degraded = 0;          // Wd
    double w_accepted = 1;          // Wb
    std::size_t buffer_capacity = 50;  // packets, shared across both queues
    SimTime mi = SimTime::from_usec(100'000);
    void validate() const;
};

enum class AbOutcome : std::uint8_t { EnqueuedAccepted, EnqueuedDegraded, Dropped };

// Dual-queue buffer: arrivals are classified against Tr by a sliding-window
// rate estimate; packets over threshold are degraded (PCN-marked) and queued
// at low priority. Service interleaves the queues by deficit round robin with
// quanta in the Wb:Wd ratio.
class AdditionalBufferQueue {
  public:
    explicit AdditionalBufferQueue(AbParams params);

    AbOutcome on_arrival(Packet pkt, SimTime now);
    std::optional<Packet> schedule_next();

    std::size_t backlog() const { return accepted_.size() + degraded_.size(); }
    std::size_t accepted_backlog() const { return accepted_.size(); }
    std::size_t degraded_backlog() const { return degraded_.size(); }
    const AbParams& params() const { return params_; }

  private:
    AbParams params_;
    BandwidthMeterState rate_;
    std::deque<Packet> accepted_;
    std::deque<Packet> degraded_;
    double deficit_[2] = {0, 0};   // [0]=accepted, [1]=degraded
    int visiting_ = 0;
};

// ---------------------------------------------------------------------------
// Uniform per-link dispatch for the FIFO-style techniques (RED, ECN, TB, BM).
// The additional-buffer technique replaces the queue itself and is handled by
// AdditionalBufferQueue above.

class Meter {
  public:
    virtual ~Meter() = default;
    virtual MeterDecision on_arrival(Packet& pkt, SimTime now, std::size_t queue_len, Rng& rng) = 0;
};

class RedMeter : public Meter {
  public:
    explicit RedMeter(RedParams p) { state_.params = p; p.validate(); }
    MeterDecision on_arrival(Packet& pkt, SimTime now, std::size_t queue_len, Rng& rng) override;
    const RedState& state() const { return state_; }

  private:
    RedState state_;
};

class EcnMeter : public Meter {
  public:
    explicit EcnMeter(RedParams p) { state_.params = p; p.validate(); }
    MeterDecision on_arrival(Packet& pkt, SimTime now, std::size_t queue_len, Rng& rng) override;
    const RedState& state() const { return state_; }

  private:
    RedState state_;
};

class TokenBucketMeter : public Meter {
  public:
    explicit TokenBucketMeter(TokenBucketParams p) {
        p.validate();
        state_.params = p;
        state_.tokens = p.capacity_bytes;  // bucket starts full
    }
    MeterDecision on_arrival(Packet& pkt, SimTime now, std::size_t queue_len, Rng& rng) override;
    const TokenBucketState& state() const { return state_; }

  private:
    TokenBucketState state_;
};

class BandwidthMeterMeter : public Meter {
  public:
    BandwidthMeterMeter(SimTime mi, double threshold_bps) {
        state_.mi = mi;
        state_.threshold_bps = threshold_bps;
    }
    MeterDecision on_arrival(Packet& pkt, SimTime now, std::size_t queue_len, Rng& rng) override;
    const BandwidthMeterState& state() const { return state_; }

  private:
    BandwidthMeterState state_;
};

}  // namespace pcn

#endif
