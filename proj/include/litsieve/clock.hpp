#pragma once

#include <atomic>
#include <chrono>

namespace litsieve {

/// Milliseconds since an arbitrary, clock-specific epoch.
using Instant = std::chrono::milliseconds;

/// Time source for backoff and rate limiting, injectable so tests never sleep.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Instant now() = 0;
    virtual void sleep_until(Instant t) = 0;

    void sleep_for(std::chrono::milliseconds d) { sleep_until(now() + d); }
};

class SteadyClock : public Clock {
public:
    Instant now() override;
    void sleep_until(Instant t) override;

    static SteadyClock& instance();
};

/// Virtual time: sleeping advances the clock instead of blocking. Time never
/// moves backwards.
class ManualClock : public Clock {
public:
    explicit ManualClock(Instant start = Instant{0}) : now_(start.count()) {}

    Instant now() override { return Instant{now_.load()}; }
    void sleep_until(Instant t) override;
    void advance(std::chrono::milliseconds d) { now_ += d.count(); }

private:
    std::atomic<std::int64_t> now_;
};

}  // namespace litsieve
