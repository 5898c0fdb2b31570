#pragma once

#include <atomic>

namespace pacer {

/// Monotonic time source in seconds. Successive calls never decrease.
class Clock {
public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
};

class SteadyClock final : public Clock {
public:
  double now() const override;
};

/// Hand-driven clock for tests and --faketime runs.
class ManualClock final : public Clock {
public:
  explicit ManualClock(double start = 0.0) : now_(start) {}

  double now() const override { return now_.load(); }

  /// Moves time forward to `t`; earlier values are ignored.
  void set(double t);
  void advance(double seconds) { set(now() + seconds); }

private:
  std::atomic<double> now_;
};

}  // namespace pacer
