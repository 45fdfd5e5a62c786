#include "pcn/domain.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcn {

double cle_update(CleEstimator& est, int thr_bit) {
    if (thr_bit != 0 && thr_bit != 1) throw std::invalid_argument("cle_update: Thr must be 0 or 1");
    est.cle = static_cast<double>(thr_bit) * (1.0 - est.weight) + est.weight * est.cle;
    return est.cle;
}

AdmissionSignal egress_feedback(const CleEstimator& est, SimTime now) {
    AdmissionSignal sig;
    sig.decision = est.cle >= est.admit_threshold ? AdmissionDecision::Block
                                                  : AdmissionDecision::Admit;
    sig.issued_at = now;
    sig.cle_snapshot = est.cle;
    return sig;
}

void ingress_admission(Flow& flow, const AdmissionSignal& signal, SimTime now) {
    if (flow.state() != FlowState::Requested)
        throw std::invalid_argument(std::string("ingress_admission: flow is ") +
                                    flow_state_name(flow.state()) + ", expected Requested");
    if (signal.decision == AdmissionDecision::Admit)
        flow.admit(now);
    else
        flow.block();
}

PreCongestionState classify_precongestion(double r_bps, const LinkConfig& link) {
    if (r_bps < 0) throw std::invalid_argument("classify_precongestion: negative rate");
    if (r_bps > link.supportable_rate_bps) return PreCongestionState::SrPreCongested;
    if (r_bps > link.admissible_rate_bps) return PreCongestionState::ArPreCongested;
    return PreCongestionState::NoPreCongestion;
}

std::vector<std::uint64_t> flow_termination(std::span<Flow* const> admitted, double r_bps,
                                            const LinkConfig& link, double per_flow_rate_bps,
                                            SimTime now) {
    if (!(per_flow_rate_bps > 0))
        throw std::invalid_argument("flow_termination: per-flow rate must be positive");
    std::vector<std::uint64_t> out;
    if (r_bps <= link.supportable_rate_bps) return out;

    std::vector<Flow*> candidates;
    for (Flow* f : admitted) {
        if (f->state() != FlowState::Admitted) continue;
        if (f->admitted_at() && *f->admitted_at() >= now) continue;  // not yet eligible
        candidates.push_back(f);
    }
    // Newest admission first; larger id breaks ties for determinism.
    std::sort(candidates.begin(), candidates.end(), [](const Flow* a, const Flow* b) {
        const SimTime ta = a->admitted_at().value_or(SimTime{});
        const SimTime tb = b->admitted_at().value_or(SimTime{});
        if (ta != tb) return ta > tb;
        return a->id() > b->id();
    });

    double excess = r_bps - link.supportable_rate_bps;
    for (Flow* f : candidates) {
        if (excess <= 0) break;
        if (f->terminate(now)) {
            out.push_back(f->id());
            excess -= per_flow_rate_bps;
        }
    }
    return out;
}

std::vector<std::uint64_t> flow_termination(std::span<Flow> admitted, double r_bps,
                                            const LinkConfig& link, double per_flow_rate_bps,
                                            SimTime now) {
    std::vector<Flow*> ptrs;
    ptrs.reserve(admitted.size());
    for (Flow& f : admitted) ptrs.push_back(&f);
    return flow_termination(std::span<Flow* const>(ptrs), r_bps, link, per_flow_rate_bps, now);
}

std::optional<Packet> interior_process(Packet pkt, Meter& meter, SimTime now,
                                       std::size_t queue_len, Rng& rng) {
    switch (meter.on_arrival(pkt, now, queue_len, rng)) {
        case MeterDecision::Forward:
            return pkt;
        case MeterDecision::Mark:
            pkt.pcn_marked = true;
            return pkt;
        case MeterDecision::Drop:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace pcn
