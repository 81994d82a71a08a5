#pragma once

#include <cstdint>

namespace ssiam {

// Logical time. Advanced only by explicit scenario steps, never wall time.
// One unit is one minute of simulated time where a policy needs a calendar:
// minute-of-day = now % 1440, weekday = (now / 1440) % 7 with 0 = Monday.
struct LogicalClock {
    uint64_t now = 0;
};

constexpr uint64_t kMinutesPerDay = 1440;

inline int weekday_of(uint64_t t) { return static_cast<int>((t / kMinutesPerDay) % 7); }
inline int minute_of_day(uint64_t t) { return static_cast<int>(t % kMinutesPerDay); }

}  // namespace ssiam
