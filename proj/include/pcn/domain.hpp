#ifndef PCN_DOMAIN_HPP
#define PCN_DOMAIN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcn/core.hpp"
#include "pcn/metering.hpp"
#include "pcn/time.hpp"

namespace pcn {

// Egress-side congestion level estimator, Eq. 1:
//   CLE_n = Thr*(1 - CLE_w) + CLE_w*CLE_{n-1}
// updated once per packet observed at the egress; Thr=1 iff PCN-marked.
struct CleEstimator {
    double cle = 0;
    double weight = 0.9;           // CLE_w
    double admit_threshold = 0.5;  // Block when cle >= this
};

double cle_update(CleEstimator& est, int thr_bit);

enum class AdmissionDecision : std::uint8_t { Admit, Block };

struct AdmissionSignal {
    AdmissionDecision decision = AdmissionDecision::Admit;
    SimTime issued_at{};
    double cle_snapshot = 0;
};

AdmissionSignal egress_feedback(const CleEstimator& est, SimTime now);

// Applies the latest egress signal to a Requested flow. Throws on any other
// flow state.
void ingress_admission(Flow& flow, const AdmissionSignal& signal, SimTime now);

enum class PreCongestionState : std::uint8_t {
    NoPreCongestion,
    ArPreCongested,
    SrPreCongested,
};

// r <= Ar -> none; Ar < r <= Sr -> Ar-pre-congested; r > Sr -> Sr-pre-congested.
PreCongestionState classify_precongestion(double r_bps, const LinkConfig& link);

// Terminates the minimal number of flows, newest admission first, so that
// r - k*per_flow_rate <= Sr. Flows admitted at or after `now` are not yet
// eligible. Returns the ids of the flows marked Terminated; terminates every
// eligible flow when even that cannot reach Sr.
std::vector<std::uint64_t> flow_termination(std::span<Flow> admitted, double r_bps,
                                            const LinkConfig& link, double per_flow_rate_bps,
                                            SimTime now);
std::vector<std::uint64_t> flow_termination(std::span<Flow* const> admitted, double r_bps,
                                            const LinkConfig& link, double per_flow_rate_bps,
                                            SimTime now);

// One interior-node hop: run the configured meter, apply the verdict to the
// packet. Mark sets the PCN mark and forwards; Drop discards.
std::optional<Packet> interior_process(Packet pkt, Meter& meter, SimTime now,
                                       std::size_t queue_len, Rng& rng);

}  // namespace pcn

#endif
