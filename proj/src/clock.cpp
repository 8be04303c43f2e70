#include "litsieve/clock.hpp"

#include <thread>

namespace litsieve {

Instant SteadyClock::now() {
    return std::chrono::duration_cast<Instant>(std::chrono::steady_clock::now().time_since_epoch());
}

void SteadyClock::sleep_until(Instant t) {
    std::this_thread::sleep_until(std::chrono::steady_clock::time_point(t));
}

SteadyClock& SteadyClock::instance() {
    static SteadyClock clock;
    return clock;
}

void ManualClock::sleep_until(Instant t) {
    std::int64_t current = now_.load();
    while (current < t.count() && !now_.compare_exchange_weak(current, t.count())) {
    }
}

}  // namespace litsieve
