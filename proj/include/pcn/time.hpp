#ifndef PCN_TIME_HPP
#define PCN_TIME_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>

namespace pcn {

// Simulated time as integer microseconds. Fixed-point so that event ordering
// is exact: two events scheduled for the same instant compare equal on every
// run, with no floating-point drift.
struct SimTime {
    std::int64_t usec = 0;

    constexpr SimTime() = default;
    constexpr explicit SimTime(std::int64_t us) : usec(us) {}

    static SimTime from_seconds(double s) {
        if (!(s >= 0.0)) throw std::invalid_argument("SimTime: negative or NaN seconds");
        return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
    }
    static constexpr SimTime from_usec(std::int64_t us) { return SimTime(us); }
    static SimTime from_millis(double ms) { return from_seconds(ms / 1e3); }

    double seconds() const { return static_cast<double>(usec) / 1e6; }

    friend constexpr auto operator<=>(SimTime a, SimTime b) = default;

    constexpr SimTime operator+(SimTime d) const { return SimTime(usec + d.usec); }
    constexpr SimTime operator-(SimTime d) const { return SimTime(usec - d.usec); }
    constexpr SimTime& operator+=(SimTime d) { usec += d.usec; return *this; }
};

}  // namespace pcn

#endif
