#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dpmix {

/// Seeded random stream. A RandomSource is single-owner: it is never shared
/// across threads. Parallel chains split independent child streams up front
/// with split(). Identical seeds produce identical draw sequences.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Deterministically derive an independent child stream. Advances this
  /// stream by one draw.
  RandomSource split() { return RandomSource(next_u64()); }

  std::uint64_t next_u64() { return engine_(); }

  double uniform() {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(engine_);
  }

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  double normal() {
    // Fresh distribution object per call: no cached spare, so the output is
    // a pure function of (seed, call sequence).
    std::normal_distribution<double> d(0.0, 1.0);
    return d(engine_);
  }

  /// Gamma in shape-rate form.
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> d(shape, 1.0 / rate);
    return d(engine_);
  }

  double beta(double a, double b) {
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    return x / (x + y);
  }

  double exponential(double rate) {
    std::exponential_distribution<double> d(rate);
    return d(engine_);
  }

  long poisson(double mean) {
    std::poisson_distribution<long> d(mean);
    return d(engine_);
  }

  double chi_squared(double df) {
    std::chi_squared_distribution<double> d(df);
    return d(engine_);
  }

  double student_t(double df) {
    std::student_t_distribution<double> d(df);
    return d(engine_);
  }

  /// Index in [0, n) from explicit (unnormalized, nonnegative) weights. Ties
  /// and boundaries are resolved by the single sampled uniform.
  std::size_t categorical(const std::vector<double>& weights);

  /// Engine state serialization, for artifact round trips.
  std::string save_state() const;
  void restore_state(const std::string& text);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dpmix
