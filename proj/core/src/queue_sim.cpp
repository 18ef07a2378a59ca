#include "ispmarket/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ispmarket/errors.hpp"

namespace ispmarket {

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed & 0xffffffffu),
                         static_cast<std::uint32_t>(seed >> 32), id};
  engine_.seed(sequence);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

QueueRunReport simulate_mm1(double arrival_rate, double service_rate, std::uint64_t requests,
                            std::uint64_t seed) {
  if (!(arrival_rate > 0.0) || !(service_rate > 0.0)) {
    throw DomainError("arrival and service rates must be positive");
  }
  if (!(arrival_rate < service_rate)) {
    throw DomainError("queue overloaded: arrival rate must be below the service rate");
  }
  if (requests == 0) throw DomainError("at least one request is required");

  RandomStream arrivals(seed, RandomStream::kInterarrivals);
  RandomStream services(seed, RandomStream::kServices);

  const auto warmup = static_cast<std::uint64_t>(kWarmupFraction * static_cast<double>(requests));
  const std::uint64_t measured = requests - warmup;
  const std::uint64_t batches = std::min<std::uint64_t>(kBatchCount, measured);
  const std::uint64_t batch_size = measured / batches;

  std::vector<double> batch_sums(batches, 0.0);
  double total = 0.0;
  double wait = 0.0;  // queueing delay of the current request
  for (std::uint64_t k = 0; k < requests; ++k) {
    const double service = services.exponential(service_rate);
    const double sojourn = wait + service;
    if (k >= warmup) {
      const std::uint64_t index = k - warmup;
      total += sojourn;
      const std::uint64_t batch = index / batch_size;
      if (batch < batches) batch_sums[batch] += sojourn;
    }
    const double gap = arrivals.exponential(arrival_rate);
    wait = std::max(0.0, sojourn - gap);
  }

  QueueRunReport report;
  report.arrival_rate = arrival_rate;
  report.service_rate = service_rate;
  report.requests_served = requests;
  report.requests_measured = measured;
  report.seed = seed;
  report.mean_sojourn = total / static_cast<double>(measured);

  if (batches >= 2) {
    double mean_of_batches = 0.0;
    for (double sum : batch_sums) mean_of_batches += sum / static_cast<double>(batch_size);
    mean_of_batches /= static_cast<double>(batches);
    double sq = 0.0;
    for (double sum : batch_sums) {
      const double dev = sum / static_cast<double>(batch_size) - mean_of_batches;
      sq += dev * dev;
    }
    const double variance = sq / static_cast<double>(batches - 1);
    report.std_error = std::sqrt(variance / static_cast<double>(batches));
  }
  return report;
}

}  // namespace ispmarket
