#ifndef PCN_EVENT_QUEUE_HPP
#define PCN_EVENT_QUEUE_HPP

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pcn/core.hpp"
#include "pcn/domain.hpp"
#include "pcn/time.hpp"

namespace pcn {

enum class EventKind : std::uint8_t {
    PacketArrival,
    PacketDeparture,
    FlowRequest,
    FeedbackSignal,
    GeneratorTick,
    PauseStart,
    PauseEnd,
    SimEnd,
};

struct Event {
    SimTime time{};
    std::uint64_t seq = 0;  // assigned by the queue; tie-break at equal times
    EventKind kind = EventKind::SimEnd;
    std::uint64_t a = 0;    // small payload ids, meaning depends on kind
    std::uint64_t b = 0;
    std::optional<Packet> pkt;
    std::optional<AdmissionSignal> signal;
};

// Deterministic discrete-event kernel: pop order is strictly increasing
// (time, seq). Scheduling into the past is a kernel bug and throws.
class EventQueue {
  public:
    void schedule(Event e) {
        if (e.time < now_)
            throw std::logic_error("EventQueue: scheduling into the past");
        e.seq = next_seq_++;
        heap_.push(std::move(e));
    }

    std::optional<Event> pop_next() {
        if (heap_.empty()) return std::nullopt;
        Event e = heap_.top();
        heap_.pop();
        now_ = e.time;
        return e;
    }

    SimTime now() const { return now_; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

  private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    SimTime now_{};
};

}  // namespace pcn

#endif
