#include "umcalc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace umcalc {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    philox_round(counter, key);
  }
  return counter;
}

std::uint64_t stream_id(std::string_view label) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream) {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::uint64_t sid = stream_id(stream);
  stream_ = {static_cast<std::uint32_t>(sid), static_cast<std::uint32_t>(sid >> 32)};
}

std::uint64_t CounterRng::next_u64() {
  if (buffered_ < 2) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32), stream_[0], stream_[1]},
                         key_);
    ++block_;
    buffered_ = 4;
  }
  const std::uint64_t hi = buffer_[buffered_ - 1];
  const std::uint64_t lo = buffer_[buffered_ - 2];
  buffered_ -= 2;
  return (hi << 32) | lo;
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::exponential(double rate) {
  if (!(rate > 0)) {
    throw std::invalid_argument("exponential rate must be positive");
  }
  return -std::log(uniform_positive()) / rate;
}

std::uint64_t CounterRng::poisson(double mean) {
  if (!(mean >= 0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson mean must be finite and nonnegative");
  }
  if (mean == 0) {
    return 0;
  }
  if (mean > 30.0) {
    const double half = mean / 2;
    return poisson(half) + poisson(mean - half);
  }
  const double limit = std::exp(-mean);
  std::uint64_t count = 0;
  double product = uniform_positive();
  while (product > limit) {
    ++count;
    product *= uniform_positive();
  }
  return count;
}

std::size_t CounterRng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0)) {
      throw std::invalid_argument("categorical weights must be nonnegative");
    }
    total += w;
  }
  if (!(total > 0)) {
    throw std::invalid_argument("categorical weights must not all vanish");
  }
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) {
      return i;
    }
  }
  return weights.size() - 1;
}

}  // namespace umcalc
