#include "pcn/metering.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcn {

// ---------------------------------------------------------------------------
// RED

void RedParams::validate() const {
    if (!(w_q > 0 && w_q <= 1)) throw std::invalid_argument("RED: w_q must be in (0,1]");
    if (!(min_thr > 0 && min_thr < max_thr))
        throw std::invalid_argument("RED: need 0 < min_thr < max_thr");
    if (!(max_p > 0 && max_p <= 1)) throw std::invalid_argument("RED: max_p must be in (0,1]");
}

double red_update_avg(RedState& st, double instantaneous_queue) {
    if (instantaneous_queue < 0) throw std::invalid_argument("red_update_avg: negative queue");
    st.avg = (1.0 - st.params.w_q) * st.avg + st.params.w_q * instantaneous_queue;
    return st.avg;
}

double red_marking_probability(const RedState& st) {
    const RedParams& p = st.params;
    double pp = p.max_p * (st.avg - p.min_thr) / (p.max_thr - p.min_thr);
    pp = std::clamp(pp, 0.0, p.max_p);
    if (pp <= 0) return 0;
    const double denom = 1.0 - static_cast<double>(st.count) * pp;
    if (denom <= pp) return 1.0;  // count*P_p >= 1 - P_p: Eq. 3 would exceed 1, clamp
    return pp / denom;
}

MeterDecision red_on_arrival(RedState& st, const Packet&, std::size_t queue_len, Rng& rng) {
    red_update_avg(st, static_cast<double>(queue_len));
    const RedParams& p = st.params;
    if (st.avg < p.min_thr) {
        st.count = -1;
        return MeterDecision::Forward;
    }
    if (st.avg >= p.max_thr) {
        st.count = 0;
        return MeterDecision::Mark;
    }
    ++st.count;
    const double pa = red_marking_probability(st);
    if (rng.next_unit() < pa) {
        st.count = 0;
        return MeterDecision::Mark;
    }
    return MeterDecision::Forward;
}

MeterDecision ecn_on_arrival(RedState& st, Packet& pkt, std::size_t queue_len, Rng& rng) {
    const MeterDecision red = red_on_arrival(st, pkt, queue_len, rng);
    if (red != MeterDecision::Mark) return red;
    switch (classify_codepoint(pkt.codepoint)) {
        case EcnClass::EcnCapable:
            pkt.codepoint = EcnCodepoint::Ce;
            return MeterDecision::Mark;
        case EcnClass::CongestionExperienced:
            return MeterDecision::Mark;  // already CE
        case EcnClass::NotEcnCapable:
            return MeterDecision::Drop;  // cannot carry the signal
    }
    return MeterDecision::Forward;
}

// ---------------------------------------------------------------------------
// Token bucket

void TokenBucketParams::validate() const {
    if (!(capacity_bytes > 0)) throw std::invalid_argument("TB: capacity must be positive");
    if (!(fill_rate_Bps > 0)) throw std::invalid_argument("TB: fill rate must be positive");
    if (mark_threshold_bytes < 0 || mark_threshold_bytes > capacity_bytes)
        throw std::invalid_argument("TB: mark threshold must be in [0, BC]");
}

void tb_refill(TokenBucketState& st, SimTime now) {
    if (now < st.last_refill) throw std::invalid_argument("tb_refill: time went backwards");
    const double elapsed_s = static_cast<double>((now - st.last_refill).usec) / 1e6;
    st.tokens = std::min(st.params.capacity_bytes, st.tokens + st.params.fill_rate_Bps * elapsed_s);
    st.last_refill = now;
}

MeterDecision tb_on_arrival(TokenBucketState& st, const Packet& pkt, SimTime now) {
    tb_refill(st, now);
    st.tokens = std::max(0.0, st.tokens - static_cast<double>(pkt.size_bytes));
    return st.tokens < st.params.mark_threshold_bytes ? MeterDecision::Mark
                                                      : MeterDecision::Forward;
}

// ---------------------------------------------------------------------------
// Bandwidth metering

void bm_record(BandwidthMeterState& st, SimTime now, std::uint32_t bytes) {
    if (!st.window.empty() && now < st.window.back().first)
        throw std::invalid_argument("bm_record: timestamps must be non-decreasing");
    st.window.emplace_back(now, bytes);
    st.window_bytes += bytes;
}

double bm_measure(BandwidthMeterState& st, SimTime now) {
    const SimTime cutoff = now - st.mi;
    while (!st.window.empty() && st.window.front().first <= cutoff) {
        st.window_bytes -= st.window.front().second;
        st.window.pop_front();
    }
    const double mi_s = static_cast<double>(st.mi.usec) / 1e6;
    return static_cast<double>(st.window_bytes) * 8.0 / mi_s;
}

MeterDecision bm_on_arrival(BandwidthMeterState& st, const Packet& pkt, SimTime now) {
    bm_record(st, now, pkt.size_bytes);
    return bm_measure(st, now) > st.threshold_bps ? MeterDecision::Mark : MeterDecision::Forward;
}

// ---------------------------------------------------------------------------
// Additional buffer

double ab_compute_threshold(double ar_bps, double or_bps) {
    if (ar_bps > or_bps) throw std::invalid_argument("ab_compute_threshold: Ar must not exceed Or");
    return (ar_bps + or_bps) / 2.0;
}

std::pair<double, double> ab_weights(double tr_bps, double or_bps) {
    if (!(or_bps > 0)) throw std::invalid_argument("ab_weights: Or must be positive");
    if (!(tr_bps > 0) || tr_bps > or_bps)
        throw std::invalid_argument("ab_weights: need 0 < Tr <= Or");
    const double wb = tr_bps / or_bps;
    const double wd = 1.0 - wb;
    return {wd, wb};
}

void AbParams::validate() const {
    if (!(threshold_rate_bps > 0)) throw std::invalid_argument("AB: Tr must be positive");
    if (w_degraded < 0 || w_accepted < 0)
        throw std::invalid_argument("AB: weights must be non-negative");
    if (buffer_capacity == 0) throw std::invalid_argument("AB: buffer capacity must be positive");
}

AdditionalBufferQueue::AdditionalBufferQueue(AbParams params) : params_(params) {
    params_.validate();
    rate_.mi = params_.mi;
    rate_.threshold_bps = params_.threshold_rate_bps;
}

AbOutcome AdditionalBufferQueue::on_arrival(Packet pkt, SimTime now) {
    bm_record(rate_, now, pkt.size_bytes);
    const double rate_bps = bm_measure(rate_, now);
    const bool degraded = rate_bps > params_.threshold_rate_bps;
    if (backlog() >= params_.buffer_capacity) return AbOutcome::Dropped;
    if (degraded) {
        pkt.pcn_marked = true;
        pkt.priority = PacketPriority::Degraded;
        degraded_.push_back(pkt);
        return AbOutcome::EnqueuedDegraded;
    }
    pkt.priority = PacketPriority::Accepted;
    accepted_.push_back(pkt);
    return AbOutcome::EnqueuedAccepted;
}

std::optional<Packet> AdditionalBufferQueue::schedule_next() {
    if (accepted_.empty() && degraded_.empty()) return std::nullopt;
    // Work conserving: a lone non-empty queue is served directly and deficits
    // reset so no credit is banked across idle periods.
    if (degraded_.empty() || accepted_.empty()) {
        deficit_[0] = deficit_[1] = 0;
        auto& q = degraded_.empty() ? accepted_ : degraded_;
        Packet p = q.front();
        q.pop_front();
        return p;
    }
    // Both backlogged: deficit round robin, quanta proportional to Wb:Wd.
    const double quantum_bytes = 2.0 * kDefaultPacketBytes;
    const double quantum[2] = {params_.w_accepted * quantum_bytes,
                               params_.w_degraded * quantum_bytes};
    for (int guard = 0; guard < 1'000'000; ++guard) {
        auto& q = visiting_ == 0 ? accepted_ : degraded_;
        if (!q.empty() && deficit_[visiting_] >= static_cast<double>(q.front().size_bytes)) {
            deficit_[visiting_] -= static_cast<double>(q.front().size_bytes);
            Packet p = q.front();
            q.pop_front();
            return p;
        }
        visiting_ ^= 1;
        deficit_[visiting_] += quantum[visiting_];
    }
    throw std::logic_error("AdditionalBufferQueue: scheduler failed to make progress");
}

// ---------------------------------------------------------------------------
// Meter wrappers

MeterDecision RedMeter::on_arrival(Packet& pkt, SimTime, std::size_t queue_len, Rng& rng) {
    return red_on_arrival(state_, pkt, queue_len, rng);
}

MeterDecision EcnMeter::on_arrival(Packet& pkt, SimTime, std::size_t queue_len, Rng& rng) {
    return ecn_on_arrival(state_, pkt, queue_len, rng);
}

MeterDecision TokenBucketMeter::on_arrival(Packet& pkt, SimTime now, std::size_t, Rng&) {
    return tb_on_arrival(state_, pkt, now);
}

MeterDecision BandwidthMeterMeter::on_arrival(Packet& pkt, SimTime now, std::size_t, Rng&) {
    return bm_on_arrival(state_, pkt, now);
}

}  // namespace pcn
