#include "ridgeshift/random.hpp"

#include <cmath>

namespace ridgeshift {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t stream_key(std::uint64_t run_seed, std::uint64_t index,
                         StreamPurpose purpose) noexcept {
  const auto tag = static_cast<std::uint64_t>(purpose);
  std::uint64_t k = mix64(run_seed + kGolden);
  k = mix64(k ^ mix64(index * kGolden + 0x632BE59BD9B4E019ULL));
  return mix64(k ^ (tag * 0xD6E8FEB86659FD93ULL));
}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  return u * scale;
}

}  // namespace ridgeshift
