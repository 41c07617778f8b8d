#include "eaia/random.hpp"

#include <algorithm>

#include <openssl/rand.h>

#include "eaia/error.hpp"

namespace eaia {

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(word & 0xff);
      word >>= 8;
    }
  }
}

double SeededRandom::uniform01() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    fail(ErrorKind::DegenerateEphemeral, "system random source failed");
  }
}

void ScriptedRandom::fill(std::span<std::uint8_t> out) {
  if (queue_.empty()) fail(ErrorKind::DegenerateEphemeral, "scripted random source exhausted");
  std::uint64_t value = queue_.front();
  queue_.pop_front();
  std::fill(out.begin(), out.end(), std::uint8_t{0});
  for (std::size_t i = out.size(); i-- > 0 && value != 0;) {
    out[i] = static_cast<std::uint8_t>(value & 0xff);
    value >>= 8;
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (label + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace eaia
