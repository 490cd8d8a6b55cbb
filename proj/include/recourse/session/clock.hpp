#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

namespace recourse::session {

// Microsecond timestamps. Sessions call now() once per event they emit.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_us() = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_us() override;
};

// Starts at `start` and advances by `step` on every read.
class SteppingClock final : public Clock {
 public:
  explicit SteppingClock(std::int64_t start = 0, std::int64_t step = 1000) : next_(start), step_(step) {}
  std::int64_t now_us() override;

 private:
  std::mutex mu_;
  std::int64_t next_;
  std::int64_t step_;
};

// Plays back a fixed list of timestamps, then keeps counting up by one.
class SequenceClock final : public Clock {
 public:
  explicit SequenceClock(std::vector<std::int64_t> ticks) : ticks_(std::move(ticks)) {}
  std::int64_t now_us() override;

 private:
  std::vector<std::int64_t> ticks_;
  std::size_t index_ = 0;
  std::int64_t last_ = 0;
};

}  // namespace recourse::session
