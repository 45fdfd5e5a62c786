#include "pcn/core.hpp"

namespace pcn {

EcnCodepoint codepoint_from_bits(unsigned bits) {
    if (bits > 0b11) throw std::invalid_argument("codepoint_from_bits: not a 2-bit value");
    return static_cast<EcnCodepoint>(bits);
}

unsigned codepoint_bits(EcnCodepoint cp) { return static_cast<unsigned>(cp); }

EcnClass classify_codepoint(EcnCodepoint cp) {
    switch (cp) {
        case EcnCodepoint::Ect0:
        case EcnCodepoint::Ect1:
            return EcnClass::EcnCapable;
        case EcnCodepoint::Ce:
            return EcnClass::CongestionExperienced;
        case EcnCodepoint::NotEct:
            return EcnClass::NotEcnCapable;
    }
    throw std::logic_error("classify_codepoint: corrupt codepoint");
}

Packet make_packet(std::uint64_t id, std::uint64_t flow_id, std::uint32_t size_bytes,
                   EcnCodepoint cp, SimTime created_at) {
    if (size_bytes < kMinPacketBytes)
        throw std::invalid_argument("make_packet: size below 40-byte header");
    Packet p;
    p.id = id;
    p.flow_id = flow_id;
    p.size_bytes = size_bytes;
    p.codepoint = cp;
    p.created_at = created_at;
    return p;
}

const char* flow_state_name(FlowState s) {
    switch (s) {
        case FlowState::Requested: return "Requested";
        case FlowState::Admitted: return "Admitted";
        case FlowState::Blocked: return "Blocked";
        case FlowState::Terminated: return "Terminated";
    }
    return "?";
}

bool Flow::admit(SimTime now) {
    if (state_ != FlowState::Requested) return false;
    state_ = FlowState::Admitted;
    admitted_at_ = now;
    return true;
}

bool Flow::block() {
    if (state_ != FlowState::Requested) return false;
    state_ = FlowState::Blocked;
    return true;
}

bool Flow::terminate(SimTime now) {
    if (state_ != FlowState::Admitted) return false;
    if (admitted_at_ && now <= *admitted_at_) return false;  // terminated_at must exceed admitted_at
    state_ = FlowState::Terminated;
    terminated_at_ = now;
    return true;
}

void LinkConfig::validate() const {
    if (!(capacity_bps > 0)) throw std::invalid_argument("LinkConfig: capacity must be positive");
    if (!(admissible_rate_bps > 0)) throw std::invalid_argument("LinkConfig: Ar must be positive");
    if (admissible_rate_bps > supportable_rate_bps)
        throw std::invalid_argument("LinkConfig: Ar must not exceed Sr");
    if (supportable_rate_bps > capacity_bps)
        throw std::invalid_argument("LinkConfig: Sr must not exceed capacity");
    if (objective_rate_bps < admissible_rate_bps || objective_rate_bps > capacity_bps)
        throw std::invalid_argument("LinkConfig: Or must lie in [Ar, capacity]");
}

}  // namespace pcn
