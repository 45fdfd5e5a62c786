#include "pcn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>

#include "pcn/domain.hpp"
#include "pcn/event_queue.hpp"
#include "pcn/metering.hpp"
#include "pcn/rng.hpp"

namespace pcn {

Topology build_topology(const ScenarioConfig& cfg) {
    cfg.validate();
    Topology topo;
    const double share = cfg.bandwidth_bps / cfg.n_links;
    for (int i = 0; i < cfg.n_links; ++i) {
        LinkConfig link;
        link.capacity_bps = share;
        link.admissible_rate_bps = cfg.ar_frac * share;
        link.supportable_rate_bps = cfg.sr_frac * share;
        link.objective_rate_bps = cfg.or_frac * share;
        link.validate();
        topo.links.push_back(link);
    }
    return topo;
}

int optimal_window_packets(double b_bps, double dp_s, int packet_size_bytes) {
    if (!(b_bps > 0) || !(dp_s > 0))
        throw std::invalid_argument("optimal_window_packets: B and DP must be positive");
    const double window_bits = 2.0 * b_bps * dp_s;
    const double pkts = window_bits / (8.0 * packet_size_bytes);
    return std::max(1, static_cast<int>(pkts));
}

void aimd_on_feedback(SenderModel& s, SenderSignal sig) {
    switch (sig) {
        case SenderSignal::Ack:
            s.window = std::min(s.window_cap, s.window + 1.0 / s.window);
            break;
        case SenderSignal::MarkEcho:
        case SenderSignal::Loss:
            s.window = std::max(1.0, s.window * 0.5);
            break;
    }
}

std::optional<std::pair<SimTime, SimTime>> pause_window_at(const ScenarioConfig& cfg, SimTime t) {
    if (cfg.pause_interval_s <= 0 || cfg.pause_len_s <= 0) return std::nullopt;
    const std::int64_t interval = SimTime::from_seconds(cfg.pause_interval_s).usec;
    const std::int64_t len = SimTime::from_seconds(cfg.pause_len_s).usec;
    if (interval <= 0 || t.usec < interval) return std::nullopt;
    const std::int64_t k = t.usec / interval;
    const std::int64_t start = k * interval;
    if (t.usec < start + len)
        return std::make_pair(SimTime(start), SimTime(start + len));
    return std::nullopt;
}

SimTime cbr_next_departure(CbrPacer& pacer, SimTime now, int rate_pps,
                           const ScenarioConfig& cfg) {
    if (rate_pps <= 0) throw std::invalid_argument("cbr_next_departure: rate must be positive");
    pacer.carry += 1'000'000;
    const std::int64_t step = pacer.carry / rate_pps;
    pacer.carry %= rate_pps;
    SimTime next = now + SimTime(std::max<std::int64_t>(1, step));
    if (auto pw = pause_window_at(cfg, next)) next = pw->second;
    return next;
}

namespace {

// GeneratorTick subtypes (Event.a)
constexpr std::uint64_t kTickSignal = 0;
constexpr std::uint64_t kTickTermination = 1;
constexpr std::uint64_t kTickSessionSend = 2;
constexpr std::uint64_t kTickConnectionStart = 3;

// FeedbackSignal subtypes (Event.a)
constexpr std::uint64_t kFeedbackAdmission = 0;
constexpr std::uint64_t kFeedbackAck = 1;
constexpr std::uint64_t kFeedbackMark = 2;
constexpr std::uint64_t kFeedbackLoss = 3;

struct LinkRt {
    LinkConfig cfg;
    std::int64_t cap_bps = 0;  // integer for exact service arithmetic
    std::unique_ptr<Meter> meter;                    // FIFO techniques
    std::unique_ptr<AdditionalBufferQueue> ab;       // AB technique
    std::deque<Packet> fifo;
    bool serving = false;
    std::int64_t service_carry = 0;
    std::int64_t busy_usec = 0;
    BandwidthMeterState marked_rate;  // PCN-marked delivery rate, drives termination
};

struct Connection {
    std::size_t flow_idx = 0;
    int link = 0;
    SenderModel sender;
};

struct Session {
    std::size_t flow_idx = 0;
    int link = 0;
    CbrPacer pacer;
};

class Simulator {
  public:
    explicit Simulator(const ScenarioConfig& cfg, RunDiagnostics* diag)
        : cfg_(cfg),
          rng_(cfg.seed ^ 0x5bd1e995u),
          arrival_rng_(cfg.seed ^ 0x9e3779b9u),
          diag_(diag) {
        cfg_.validate();
        t_end_ = SimTime::from_seconds(cfg_.duration_s);
        prop_ = SimTime::from_millis(cfg_.prop_delay_ms);
        egress_id_ = static_cast<std::uint64_t>(cfg_.n_links);
        cle_.weight = cfg_.cle_w;
        cle_.admit_threshold = cfg_.admit_threshold;
        halve_guard_ = SimTime(2 * prop_.usec + SimTime::from_millis(cfg_.loss_feedback_ms).usec);
        build_links();
    }

    MetricsRecord run_to_completion() {
        seed_initial_events();
        std::uint64_t processed = 0;
        while (auto e = q_.pop_next()) {
            dispatch(*e);
            if (++processed > 2'000'000'000ULL)
                throw std::logic_error("simulator: event storm, aborting");
        }
        if (tsp_ != tap_ + dropped_)
            throw std::logic_error("simulator: conservation violated (sent != delivered + dropped)");

        MetricsRecord rec;
        rec.technique = cfg_.technique;
        rec.bandwidth_bps = cfg_.bandwidth_bps;
        rec.seed = cfg_.seed;
        rec.tsp = tsp_;
        rec.tap = tap_;
        auto [lp, dr] = loss_stats(tsp_, tap_);
        rec.lp = lp;
        rec.drop_rate_pct = dr;
        // Bytes delivered per RTT-long window divided by the window, averaged
        // over the run; with uniform windows this reduces exactly to the
        // delivered-bit rate over the duration.
        rec.throughput_mbps = cfg_.duration_s > 0
                                  ? static_cast<double>(delivered_bytes_) * 8.0 /
                                        cfg_.duration_s / 1e6
                                  : 0.0;
        rec.admitted_sessions = admitted_;
        rec.blocked_sessions = blocked_;
        rec.terminated_sessions = terminated_;
        if (diag_) {
            diag_->final_cle = cle_.cle;
            diag_->events_processed = processed;
            double util = 0;
            for (const auto& l : links_) util += static_cast<double>(l.busy_usec);
            diag_->mean_utilization =
                t_end_.usec > 0 ? util / (static_cast<double>(t_end_.usec) * links_.size()) : 0;
        }
        return rec;
    }

  private:
    void build_links() {
        Topology topo = build_topology(cfg_);
        const SimTime mi_bm = SimTime::from_millis(cfg_.bm_mi_ms);
        const SimTime mi_ab = SimTime::from_millis(cfg_.ab_mi_ms);
        for (const LinkConfig& lc : topo.links) {
            LinkRt rt;
            rt.cfg = lc;
            rt.cap_bps = std::max<std::int64_t>(1, std::llround(lc.capacity_bps));
            rt.marked_rate.mi = SimTime::from_millis(cfg_.term_check_interval_ms);
            switch (cfg_.technique) {
                case Technique::Red:
                    rt.meter = std::make_unique<RedMeter>(red_params(lc));
                    break;
                case Technique::Ecn:
                    rt.meter = std::make_unique<EcnMeter>(red_params(lc));
                    break;
                case Technique::Tb: {
                    TokenBucketParams p;
                    p.fill_rate_Bps = cfg_.tb_rate_frac * lc.capacity_bps / 8.0;
                    p.capacity_bytes = p.fill_rate_Bps * cfg_.tb_bucket_s;
                    p.mark_threshold_bytes = cfg_.tb_mark_frac * p.capacity_bytes;
                    rt.meter = std::make_unique<TokenBucketMeter>(p);
                    break;
                }
                case Technique::Bm:
                    rt.meter = std::make_unique<BandwidthMeterMeter>(
                        mi_bm, cfg_.bm_bthr_frac * lc.capacity_bps);
                    break;
                case Technique::Ab: {
                    AbParams p;
                    p.threshold_rate_bps =
                        ab_compute_threshold(lc.admissible_rate_bps, lc.objective_rate_bps);
                    auto [wd, wb] = ab_weights(p.threshold_rate_bps, lc.objective_rate_bps);
                    p.w_degraded = wd;
                    p.w_accepted = wb;
                    p.buffer_capacity = static_cast<std::size_t>(cfg_.ab_buffer_pkts);
                    p.mi = mi_ab;
                    rt.ab = std::make_unique<AdditionalBufferQueue>(p);
                    break;
                }
            }
            links_.push_back(std::move(rt));
        }
    }

    RedParams red_params(const LinkConfig& lc) const {
        RedParams p;
        p.w_q = cfg_.red_wq;
        p.min_thr = cfg_.red_min_thr;
        p.max_thr = cfg_.red_max_thr;
        p.max_p = cfg_.red_max_p;
        if (cfg_.red_thr_ref_bps > 0) {
            // Hold the queue-delay trigger point constant across link rates.
            const double scale = lc.capacity_bps / cfg_.red_thr_ref_bps;
            p.min_thr *= scale;
            p.max_thr *= scale;
        }
        return p;
    }

    void seed_initial_events() {
        if (t_end_.usec <= 0) return;  // zero-duration run: nothing happens

        // Long-lived window-based connections, staggered starts.
        for (int i = 0; i < cfg_.n_connections; ++i) {
            flows_.emplace_back(next_flow_id_++, cfg_.packet_rate_pps);
            Connection c;
            c.flow_idx = flows_.size() - 1;
            c.link = i % cfg_.n_links;
            c.sender.window = 2;
            c.sender.window_cap = optimal_window_packets(
                cfg_.bandwidth_bps / std::max(1, cfg_.n_connections), cfg_.window_dp_s,
                cfg_.packet_size_bytes);
            connections_.push_back(c);
            const SimTime start(static_cast<std::int64_t>(i) * 5'000);
            if (start < t_end_)
                q_.schedule({start, 0, EventKind::GeneratorTick, kTickConnectionStart,
                             static_cast<std::uint64_t>(i), {}, {}});
        }

        // Session request process.
        const SimTime first = next_request_gap();
        if (first < t_end_) q_.schedule({first, 0, EventKind::FlowRequest, 0, 0, {}, {}});

        // Egress feedback signals.
        q_.schedule({SimTime(0), 0, EventKind::GeneratorTick, kTickSignal, 0, {}, {}});

        // Termination checks.
        if (cfg_.termination_enabled) {
            const SimTime step = SimTime::from_millis(cfg_.term_check_interval_ms);
            if (step < t_end_)
                q_.schedule({step, 0, EventKind::GeneratorTick, kTickTermination, 0, {}, {}});
        }

        // Generator pauses.
        if (cfg_.pause_interval_s > 0 && cfg_.pause_len_s > 0) {
            const std::int64_t interval = SimTime::from_seconds(cfg_.pause_interval_s).usec;
            const std::int64_t len = SimTime::from_seconds(cfg_.pause_len_s).usec;
            for (std::int64_t start = interval; start < t_end_.usec; start += interval) {
                q_.schedule({SimTime(start), 0, EventKind::PauseStart, 0, 0, {}, {}});
                q_.schedule({SimTime(start + len), 0, EventKind::PauseEnd, 0, 0, {}, {}});
            }
        }

        q_.schedule({t_end_, 0, EventKind::SimEnd, 0, 0, {}, {}});
    }

    // Session requests draw from their own stream so the request schedule is
    // identical across techniques for a given seed (common random numbers;
    // admission differences then show up as pure signal).
    SimTime next_request_gap() {
        const double gap_s = arrival_rng_.exponential(cfg_.session_mean_interarrival_s);
        return q_.now() + SimTime(std::max<std::int64_t>(1, std::llround(gap_s * 1e6)));
    }

    void dispatch(const Event& e) {
        switch (e.kind) {
            case EventKind::PacketArrival:
                if (e.a == egress_id_) on_egress_arrival(e);
                else on_link_arrival(e);
                break;
            case EventKind::PacketDeparture:
                on_departure(e);
                break;
            case EventKind::FlowRequest:
                on_flow_request();
                break;
            case EventKind::FeedbackSignal:
                on_feedback(e);
                break;
            case EventKind::GeneratorTick:
                on_tick(e);
                break;
            case EventKind::PauseStart:
                paused_ = true;
                break;
            case EventKind::PauseEnd:
                paused_ = false;
                for (auto& c : connections_) try_send(c);
                break;
            case EventKind::SimEnd:
                break;  // generators key off t_end_ directly
        }
    }

    // -- senders ------------------------------------------------------------

    void try_send(Connection& c) {
        if (paused_ || q_.now() >= t_end_) return;
        if (flows_[c.flow_idx].state() != FlowState::Admitted) return;
        while (c.sender.in_flight < static_cast<int>(c.sender.window)) {
            Packet p = make_packet(next_packet_id_++, flows_[c.flow_idx].id(),
                                   static_cast<std::uint32_t>(cfg_.packet_size_bytes),
                                   EcnCodepoint::Ect0, q_.now());
            ++tsp_;
            ++c.sender.in_flight;
            if (diag_) ++diag_->sends_connections;
            q_.schedule({q_.now(), 0, EventKind::PacketArrival,
                         static_cast<std::uint64_t>(c.link), flows_[c.flow_idx].id(), p, {}});
        }
    }

    void emit_session_packet(Session& s) {
        Packet p = make_packet(next_packet_id_++, flows_[s.flow_idx].id(),
                               static_cast<std::uint32_t>(cfg_.packet_size_bytes),
                               EcnCodepoint::NotEct, q_.now());
        ++tsp_;
        if (diag_) ++diag_->sends_sessions;
        q_.schedule({q_.now(), 0, EventKind::PacketArrival, static_cast<std::uint64_t>(s.link),
                     flows_[s.flow_idx].id(), p, {}});
    }

    // -- links ---------------------------------------------------------------

    void on_link_arrival(const Event& e) {
        LinkRt& link = links_[e.a];
        Packet pkt = *e.pkt;
        if (link.ab) {
            switch (link.ab->on_arrival(pkt, q_.now())) {
                case AbOutcome::Dropped:
                    if (diag_) ++diag_->drops_ab;
                    on_drop(pkt);
                    return;
                case AbOutcome::EnqueuedAccepted:
                case AbOutcome::EnqueuedDegraded:
                    break;
            }
            if (!link.serving) start_service(e.a);
            return;
        }
        auto forwarded =
            interior_process(pkt, *link.meter, q_.now(), link.fifo.size(), rng_);
        if (!forwarded) {
            if (diag_) ++diag_->drops_meter;
            on_drop(pkt);
            return;
        }
        if (link.fifo.size() >= static_cast<std::size_t>(cfg_.buffer_pkts)) {
            if (diag_) ++diag_->drops_overflow;
            on_drop(*forwarded);
            return;
        }
        link.fifo.push_back(*forwarded);
        if (!link.serving) start_service(e.a);
    }

    void start_service(std::uint64_t link_id) {
        LinkRt& link = links_[link_id];
        std::optional<Packet> next;
        if (link.ab) next = link.ab->schedule_next();
        else if (!link.fifo.empty()) {
            next = link.fifo.front();
            link.fifo.pop_front();
        }
        if (!next) return;
        link.serving = true;
        link.service_carry += static_cast<std::int64_t>(next->size_bytes) * 8 * 1'000'000;
        std::int64_t tx_us = link.service_carry / link.cap_bps;
        link.service_carry %= link.cap_bps;
        tx_us = std::max<std::int64_t>(1, tx_us);
        link.busy_usec += tx_us;
        q_.schedule({q_.now() + SimTime(tx_us), 0, EventKind::PacketDeparture, link_id, 0,
                     std::move(next), {}});
    }

    void on_departure(const Event& e) {
        LinkRt& link = links_[e.a];
        link.serving = false;
        q_.schedule({q_.now() + prop_, 0, EventKind::PacketArrival, egress_id_, e.a, e.pkt, {}});
        const std::size_t backlog = link.ab ? link.ab->backlog() : link.fifo.size();
        if (backlog > 0) start_service(e.a);
    }

    // -- egress ---------------------------------------------------------------

    void on_egress_arrival(const Event& e) {
        const Packet& pkt = *e.pkt;
        ++tap_;
        delivered_bytes_ += pkt.size_bytes;
        cle_update(cle_, pkt.pcn_marked ? 1 : 0);
        if (pkt.pcn_marked) {
            if (diag_) ++diag_->marks_seen_at_egress;
            bm_record(links_[e.b].marked_rate, q_.now(), pkt.size_bytes);
        }
        auto it = conn_by_flow_.find(pkt.flow_id);
        if (it == conn_by_flow_.end()) return;  // CBR sessions generate no echo
        // Only transport-visible congestion signals reach the sender: the CE
        // codepoint always does, and under "pcn" echo an AQM-origin mark
        // (RED) does as well. Rate-meter marks and the degraded scheduling
        // class exist for the egress estimator, not the transport.
        const bool aqm_mark = pkt.pcn_marked && pkt.priority != PacketPriority::Degraded &&
                              cfg_.technique == Technique::Red;
        const bool echo_mark =
            cfg_.mark_echo != MarkEchoMode::None &&
            (pkt.codepoint == EcnCodepoint::Ce ||
             (cfg_.mark_echo == MarkEchoMode::Pcn && aqm_mark));
        q_.schedule({q_.now() + prop_, 0, EventKind::FeedbackSignal,
                     echo_mark ? kFeedbackMark : kFeedbackAck, it->second, {}, {}});
    }

    void on_drop(const Packet& pkt) {
        ++dropped_;
        auto it = conn_by_flow_.find(pkt.flow_id);
        if (it == conn_by_flow_.end()) return;
        const SimTime delay(2 * prop_.usec + SimTime::from_millis(cfg_.loss_feedback_ms).usec);
        q_.schedule({q_.now() + delay, 0, EventKind::FeedbackSignal, kFeedbackLoss, it->second,
                     {}, {}});
    }

    // -- control plane ---------------------------------------------------------

    void on_flow_request() {
        if (q_.now() >= t_end_) return;
        flows_.emplace_back(next_flow_id_++, cfg_.packet_rate_pps);
        Flow& flow = flows_.back();
        ingress_admission(flow, latest_signal_, q_.now());
        if (flow.state() == FlowState::Admitted) {
            ++admitted_;
            Session s;
            s.flow_idx = flows_.size() - 1;
            s.link = static_cast<int>(next_session_link_++ % cfg_.n_links);
            sessions_.push_back(s);
            const SimTime first =
                cbr_next_departure(sessions_.back().pacer, q_.now(), cfg_.packet_rate_pps, cfg_);
            q_.schedule({first, 0, EventKind::GeneratorTick, kTickSessionSend,
                         sessions_.size() - 1, {}, {}});
        } else {
            ++blocked_;
        }
        const SimTime next = next_request_gap();
        if (next < t_end_) q_.schedule({next, 0, EventKind::FlowRequest, 0, 0, {}, {}});
    }

    void on_feedback(const Event& e) {
        if (e.a == kFeedbackAdmission) {
            latest_signal_ = *e.signal;
            return;
        }
        Connection& c = connections_[e.b];
        --c.sender.in_flight;
        if (e.a == kFeedbackAck) {
            aimd_on_feedback(c.sender, SenderSignal::Ack);
        } else {
            if (q_.now() >= c.sender.recover_until) {
                aimd_on_feedback(c.sender, e.a == kFeedbackMark ? SenderSignal::MarkEcho
                                                                : SenderSignal::Loss);
                // Advisory domain marks (the AQM technique's PCN marks) get a
                // stretched reaction window; CE and loss react once per RTT.
                const bool advisory = e.a == kFeedbackMark && cfg_.technique == Technique::Red;
                const double stretch = advisory ? cfg_.pcn_echo_guard_rtt : 1.0;
                c.sender.recover_until =
                    q_.now() + SimTime(static_cast<std::int64_t>(
                                   static_cast<double>(halve_guard_.usec) * stretch));
            }
        }
        try_send(c);
    }

    void on_tick(const Event& e) {
        switch (e.a) {
            case kTickSignal: {
                // An interval with no deliveries carries no marks: count it as
                // one unmarked observation so a frozen estimator can decay
                // once traffic stops (terminations would otherwise lock the
                // ingress shut forever).
                if (tap_ == tap_at_last_signal_ && cle_.cle > 0) cle_update(cle_, 0);
                tap_at_last_signal_ = tap_;
                const AdmissionSignal sig = egress_feedback(cle_, q_.now());
                q_.schedule({q_.now() + SimTime::from_millis(cfg_.signal_delay_ms), 0,
                             EventKind::FeedbackSignal, kFeedbackAdmission, 0, {}, sig});
                const SimTime next = q_.now() + SimTime::from_millis(cfg_.signal_interval_ms);
                if (next < t_end_)
                    q_.schedule({next, 0, EventKind::GeneratorTick, kTickSignal, 0, {}, {}});
                return;
            }
            case kTickTermination: {
                run_termination_check();
                const SimTime next =
                    q_.now() + SimTime::from_millis(cfg_.term_check_interval_ms);
                if (next < t_end_)
                    q_.schedule({next, 0, EventKind::GeneratorTick, kTickTermination, 0, {}, {}});
                return;
            }
            case kTickSessionSend: {
                Session& s = sessions_[e.b];
                if (flows_[s.flow_idx].state() != FlowState::Admitted) return;
                if (q_.now() >= t_end_) return;
                if (paused_) {
                    // Departure landed inside a pause window: shift to its end.
                    if (auto pw = pause_window_at(cfg_, q_.now())) {
                        q_.schedule({pw->second, 0, EventKind::GeneratorTick, kTickSessionSend,
                                     e.b, {}, {}});
                        return;
                    }
                }
                emit_session_packet(s);
                const SimTime next =
                    cbr_next_departure(s.pacer, q_.now(), cfg_.packet_rate_pps, cfg_);
                q_.schedule({next, 0, EventKind::GeneratorTick, kTickSessionSend, e.b, {}, {}});
                return;
            }
            case kTickConnectionStart: {
                Connection& c = connections_[e.b];
                flows_[c.flow_idx].admit(q_.now());
                conn_by_flow_[flows_[c.flow_idx].id()] = e.b;
                try_send(c);
                return;
            }
            default:
                throw std::logic_error("simulator: unknown tick subtype");
        }
    }

    void run_termination_check() {
        const double per_flow_bps =
            static_cast<double>(cfg_.packet_rate_pps) * cfg_.packet_size_bytes * 8.0;
        for (std::size_t li = 0; li < links_.size(); ++li) {
            LinkRt& link = links_[li];
            const double marked_bps = bm_measure(link.marked_rate, q_.now());
            if (classify_precongestion(marked_bps, link.cfg) != PreCongestionState::SrPreCongested)
                continue;
            std::vector<Flow*> on_link;
            for (const auto& s : sessions_)
                if (s.link == static_cast<int>(li)) on_link.push_back(&flows_[s.flow_idx]);
            for (const auto& c : connections_)
                if (c.link == static_cast<int>(li)) on_link.push_back(&flows_[c.flow_idx]);
            const auto ids =
                flow_termination(std::span<Flow* const>(on_link), marked_bps, link.cfg,
                                 per_flow_bps, q_.now());
            terminated_ += static_cast<int>(ids.size());
        }
    }

    ScenarioConfig cfg_;
    Rng rng_;
    Rng arrival_rng_;
    RunDiagnostics* diag_ = nullptr;
    EventQueue q_;
    SimTime t_end_{};
    SimTime prop_{};
    SimTime halve_guard_{};
    std::uint64_t egress_id_ = 0;

    std::vector<LinkRt> links_;
    std::vector<Flow> flows_;
    std::vector<Connection> connections_;
    std::vector<Session> sessions_;
    std::map<std::uint64_t, std::uint64_t> conn_by_flow_;

    CleEstimator cle_;
    AdmissionSignal latest_signal_{};  // defaults to Admit before the first signal lands

    bool paused_ = false;
    std::uint64_t next_packet_id_ = 1;
    std::uint64_t next_flow_id_ = 1;
    std::uint64_t next_session_link_ = 0;

    std::uint64_t tsp_ = 0;
    std::uint64_t tap_ = 0;
    std::uint64_t tap_at_last_signal_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t delivered_bytes_ = 0;
    int admitted_ = 0;
    int blocked_ = 0;
    int terminated_ = 0;
};

}  // namespace

MetricsRecord run(const ScenarioConfig& cfg, RunDiagnostics* diag) {
    Simulator sim(cfg, diag);
    return sim.run_to_completion();
}

}  // namespace pcn
