#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>

namespace eaia {

// Source of random bytes for scalar sampling. Each scalar draw is exactly one
// fill() call, which lets tests script the drawn values.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

// Deterministic generator for simulation and reproducible CLI runs. Not a
// CSPRNG; seed from std::random_device for anything beyond desk use.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}

  void fill(std::span<std::uint8_t> out) override;

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Operating-system randomness via OpenSSL's DRBG.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// Test hook: each fill() writes the next queued value big-endian into the
// low-order bytes (the rest zero). Exhaustion is signalled by
// DegenerateEphemeral so callers see the same error a stuck generator causes.
class ScriptedRandom final : public RandomSource {
 public:
  ScriptedRandom() = default;
  explicit ScriptedRandom(std::initializer_list<std::uint64_t> values) : queue_(values) {}

  void push(std::uint64_t value) { queue_.push_back(value); }
  std::size_t remaining() const { return queue_.size(); }
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::deque<std::uint64_t> queue_;
};

// Mixes a base seed with a label into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label);

}  // namespace eaia
