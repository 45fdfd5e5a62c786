#ifndef PCN_CORE_HPP
#define PCN_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "pcn/time.hpp"

namespace pcn {

// Two-bit ECN field. Values carry the wire bit patterns: ECT(0)="10",
// ECT(1)="01", CE="11", Not-ECT="00".
enum class EcnCodepoint : std::uint8_t {
    NotEct = 0b00,
    Ect1   = 0b01,
    Ect0   = 0b10,
    Ce     = 0b11,
};

enum class EcnClass : std::uint8_t {
    NotEcnCapable,
    EcnCapable,
    CongestionExperienced,
};

EcnCodepoint codepoint_from_bits(unsigned bits);
unsigned codepoint_bits(EcnCodepoint cp);
EcnClass classify_codepoint(EcnCodepoint cp);

enum class PacketPriority : std::uint8_t { Accepted, Degraded };

// The verdict a meter renders for one packet arrival.
enum class MeterDecision : std::uint8_t { Forward, Mark, Drop };

constexpr std::uint32_t kMinPacketBytes = 40;       // header floor
constexpr std::uint32_t kDefaultPacketBytes = 1040; // incl. 40 B header

struct Packet {
    std::uint64_t id = 0;
    std::uint64_t flow_id = 0;
    std::uint32_t size_bytes = kDefaultPacketBytes;
    EcnCodepoint codepoint = EcnCodepoint::NotEct;
    bool pcn_marked = false;
    PacketPriority priority = PacketPriority::Accepted;
    SimTime created_at{};
};

// Checked constructor; size_bytes must cover at least the 40-byte header.
Packet make_packet(std::uint64_t id, std::uint64_t flow_id, std::uint32_t size_bytes,
                   EcnCodepoint cp, SimTime created_at);

enum class FlowState : std::uint8_t { Requested, Admitted, Blocked, Terminated };

const char* flow_state_name(FlowState s);

// Admission-controlled session. Transitions are guarded: only
// Requested->{Admitted,Blocked} and Admitted->Terminated are legal; Blocked
// and Terminated are absorbing.
class Flow {
  public:
    Flow() = default;
    Flow(std::uint64_t id, int packet_rate_pps) : id_(id), packet_rate_pps_(packet_rate_pps) {}

    std::uint64_t id() const { return id_; }
    int packet_rate_pps() const { return packet_rate_pps_; }
    FlowState state() const { return state_; }
    std::optional<SimTime> admitted_at() const { return admitted_at_; }
    std::optional<SimTime> terminated_at() const { return terminated_at_; }

    // Each returns false (state unchanged) when the transition is illegal.
    bool admit(SimTime now);
    bool block();
    bool terminate(SimTime now);  // requires now > admitted_at

  private:
    std::uint64_t id_ = 0;
    int packet_rate_pps_ = 15;
    FlowState state_ = FlowState::Requested;
    std::optional<SimTime> admitted_at_;
    std::optional<SimTime> terminated_at_;
};

// Per-link PCN rate thresholds, all in bits/second.
struct LinkConfig {
    double capacity_bps = 0;
    double admissible_rate_bps = 0;   // A_r
    double supportable_rate_bps = 0;  // S_r
    double objective_rate_bps = 0;    // O_r

    // Requires 0 < Ar <= Sr <= capacity and Ar <= Or <= capacity.
    void validate() const;
};

}  // namespace pcn

#endif
