#pragma once

#include "lieaut/types.hpp"

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace lieaut {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-seeded stream. Trial i always draws the same sequence for a given
// master seed, no matter how trials are partitioned across workers, and the
// sequence does not depend on the standard library's distribution internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) { warmup(); }
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : state_(seed ^ (0x9e3779b97f4a7c15ull * (stream + 0x51ed2701ull))) {
    warmup();
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    double u1 = (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;  // (0,1)
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  Cx unit_phase() { return std::polar(1.0, uniform(0.0, 2.0 * kPi)); }

  // uniform on the open disc of the given radius
  Cx in_disc(double radius) {
    double m = radius * std::sqrt(uniform());
    return std::polar(m, uniform(0.0, 2.0 * kPi));
  }

 private:
  void warmup() {
    next_u64();
    next_u64();
  }
  std::uint64_t state_;
};

// Runs body(i, acc) for i in [0, trials), split contiguously across workers.
// Per-chunk accumulators start from `init` and are merged in chunk order;
// with per-trial RandomStream seeding and an order-insensitive merge the
// result is identical for every worker count.
template <class Acc, class Body, class Merge>
Acc run_trials(std::uint64_t trials, int workers, Acc init, Body body, Merge merge) {
  if (workers < 1) workers = 1;
  if (trials > 0 && std::uint64_t(workers) > trials) workers = int(trials);
  if (workers == 1 || trials == 0) {
    Acc acc = init;
    for (std::uint64_t i = 0; i < trials; ++i) body(i, acc);
    return acc;
  }
  std::vector<Acc> parts(std::size_t(workers), init);
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  const std::uint64_t q = trials / std::uint64_t(workers);
  const std::uint64_t r = trials % std::uint64_t(workers);
  std::uint64_t begin = 0;
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t len = q + (std::uint64_t(w) < r ? 1 : 0);
    const std::uint64_t end = begin + len;
    Acc* part = &parts[std::size_t(w)];
    pool.emplace_back([body, part, begin, end] {
      for (std::uint64_t i = begin; i < end; ++i) body(i, *part);
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  Acc acc = init;
  for (auto& p : parts) acc = merge(acc, p);
  return acc;
}

}  // namespace lieaut
