#include "recourse/session/clock.hpp"

#include <chrono>

namespace recourse::session {

std::int64_t SystemClock::now_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

std::int64_t SteppingClock::now_us() {
  std::lock_guard lock(mu_);
  auto t = next_;
  next_ += step_;
  return t;
}

std::int64_t SequenceClock::now_us() {
  last_ = index_ < ticks_.size() ? ticks_[index_++] : last_ + 1;
  return last_;
}

}  // namespace recourse::session
