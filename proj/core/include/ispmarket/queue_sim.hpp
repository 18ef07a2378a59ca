#pragma once

#include <cstdint>
#include <random>

namespace ispmarket {

struct QueueRunReport {
  double arrival_rate = 0.0;
  double service_rate = 0.0;
  std::uint64_t requests_served = 0;
  std::uint64_t requests_measured = 0;  // after the warm-up discard
  double mean_sojourn = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

// Independent random stream for the simulator. Stream `id` of `seed` is an
// mt19937_64 seeded through std::seed_seq{seed_lo, seed_hi, id}; both
// algorithms are fixed by the standard, so draws are identical on every
// platform. Exponential variates use inversion, not
// std::exponential_distribution, whose algorithm is implementation-defined.
class RandomStream {
 public:
  static constexpr std::uint32_t kInterarrivals = 1;
  static constexpr std::uint32_t kServices = 2;

  RandomStream(std::uint64_t seed, std::uint32_t id);

  double uniform();  // [0, 1), 53 random bits
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

// Single-server FCFS queue with Poisson arrivals and exponential service,
// advanced with the Lindley recursion. The first 10% of requests are discarded
// as warm-up. The standard error comes from non-overlapping batch means over
// the measured requests, since consecutive sojourn times are correlated.
//
// Throws DomainError unless 0 < arrival_rate < service_rate and requests >= 1.
QueueRunReport simulate_mm1(double arrival_rate, double service_rate,
                            std::uint64_t requests, std::uint64_t seed);

inline constexpr double kWarmupFraction = 0.1;
inline constexpr std::uint64_t kBatchCount = 50;

}  // namespace ispmarket
