#include "pacer/clock.hpp"

#include <chrono>

namespace pacer {

double SteadyClock::now() const {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void ManualClock::set(double t) {
  double current = now_.load();
  while (t > current && !now_.compare_exchange_weak(current, t)) {
  }
}

}  // namespace pacer
