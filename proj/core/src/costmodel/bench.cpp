#include "eaia/costmodel/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "eaia/bytes.hpp"
#include "eaia/error.hpp"
#include "eaia/group/hash.hpp"
#include "eaia/random.hpp"

namespace eaia::cost {

namespace {

template <typename Fn>
double median_us(unsigned iterations, Fn&& op) {
  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  samples.reserve(iterations);
  for (unsigned i = 0; i < iterations; ++i) {
    const auto start = clock::now();
    op(i);
    const auto stop = clock::now();
    samples.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
  }
  const auto mid = samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2);
  std::nth_element(samples.begin(), mid, samples.end());
  return *mid;
}

}  // namespace

PrimitiveCosts bench_primitives(unsigned iterations, const group::Group& g) {
  if (iterations == 0) fail(ErrorKind::InvalidArgument, "iterations must be at least 1");
  SeededRandom rng(0x62656e6368ULL);

  std::vector<group::Scalar> scalars;
  std::vector<group::GroupPoint> points;
  for (unsigned i = 0; i < iterations; ++i) {
    scalars.push_back(g.random_nonzero(rng));
    points.push_back(g.mul_generator(g.random_nonzero(rng)));
  }
  Bytes input(96);
  rng.fill(input);

  // Results are folded into a sink so the work cannot be elided.
  std::uint8_t sink = 0;
  PrimitiveCosts c = PrimitiveCosts::defaults();
  c.measured = true;
  c.energy_mj.clear();
  c.time_us[Primitive::Hash] = median_us(iterations, [&](unsigned i) {
    input[0] = static_cast<std::uint8_t>(i);
    sink ^= group::h1_scalar(g, input).bytes().back();
  });
  c.time_us[Primitive::ScalarMul] = median_us(iterations, [&](unsigned i) {
    sink ^= g.point_mul(scalars[i], points[i]).bytes().back();
  });
  c.time_us[Primitive::PointAdd] = median_us(iterations, [&](unsigned i) {
    sink ^= g.point_add(points[i], points[(i + 1) % iterations]).bytes().back();
  });
  volatile std::uint8_t keep = sink;
  (void)keep;
  return c;
}

PrimitiveCosts bench_primitives(unsigned iterations) {
  return bench_primitives(iterations, *group::make_p256());
}

}  // namespace eaia::cost
