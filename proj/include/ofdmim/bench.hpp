#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ofdmim/codec.hpp"
#include "ofdmim/combinadic.hpp"

namespace ofdmim {

enum class Direction { map, demap };

const char* to_string(Direction d);

/// Default PRNG seed for benchmark inputs plus two alternates for repeated
/// campaigns; any 64-bit seed is accepted and recorded in the output.
constexpr std::uint64_t default_seed() { return 1973272912; }
constexpr std::uint64_t alternate_seed_a() { return 1822174485; }
constexpr std::uint64_t alternate_seed_b() { return 1998078925; }

/// One timed (de)mapping invocation. duration covers only the codec call on
/// the monotonic clock; input generation and output consumption sit outside
/// the timed region. resolution_ok is false when the clock resolution is
/// coarser than 10% of the measured duration, in which case the sample must
/// be discarded.
struct RuntimeSample {
  double seconds = 0.0;
  OpCounter ops;
  bool resolution_ok = true;
};

RuntimeSample time_once(const ImConfig& cfg, const IndexSelector& sel,
                        std::uint64_t seed, Direction dir);

/// Deterministic m-bit benchmark input for a seed.
BitBuffer random_bits(std::size_t nbits, std::uint64_t seed);

/// Reported resolution of the monotonic clock, in seconds.
double clock_resolution_seconds();

struct CampaignOptions {
  double rel_precision = 0.05;   // target: delta <= rel_precision * mean
  double confidence = 0.95;      // two-sided Student-t confidence level
  std::size_t warmup = 300;      // discarded leading samples
  std::size_t min_samples = 16;  // retained samples before testing the CI
  std::size_t max_samples = 20000;
  std::uint64_t seed = default_seed();
};

/// One benchmark row. throughput_mbps is m_bits / runtime_us computed before
/// any rounding (bits per microsecond equals megabits per second).
struct ThroughputRecord {
  std::uint32_t N = 0;
  std::uint32_t m_bits = 0;
  double se_gain = 0.0;
  std::string mapper;
  Direction direction = Direction::map;
  double runtime_us = 0.0;
  double delta_us = 0.0;
  double throughput_mbps = 0.0;
  std::size_t samples = 0;
  bool converged = false;
  std::size_t resolution_rejects = 0;
};

/// Optional capture of every retained sample (microseconds), keyed in the
/// same order as the emitted records; used for JSON emission.
struct CampaignLog {
  std::vector<std::vector<double>> samples_us;
};

/// Serial timing campaign over the optimal configuration (g = 1, k = N / 2,
/// M = 2) for each N and selector. Samples accumulate until the Student-t CI
/// half-width reaches the requested precision or max_samples is hit, in
/// which case the record is flagged as not converged (never silently).
std::vector<ThroughputRecord> run_campaign(
    const std::vector<std::uint32_t>& n_values,
    const std::vector<const IndexSelector*>& selectors, Direction dir,
    const CampaignOptions& options, CampaignLog* log = nullptr);

/// Two-sided Student-t confidence-interval half-width for a sample mean:
/// t(df = samples - 1, (1 + confidence) / 2) * sqrt(variance / samples).
/// Returns 0 for fewer than two samples or zero variance.
double students_t_half_width(std::size_t samples, double variance,
                             double confidence);

struct KappaEstimate {
  double kappa_us = 0.0;  // average wall time per counted step
};

/// kappa = (3/2) * runtime / m(N); meaningful for linear-selector records
/// under the optimal configuration.
KappaEstimate estimate_kappa(const ThroughputRecord& record);

/// Least-squares slope of log(metric) against log(N). Refuses with fewer
/// than four points.
double fit_scaling(const std::vector<double>& n_values,
                   const std::vector<double>& metric);

/// Operation-count measurements for one selector: mean and max counter
/// values over `reps` random index-field inputs per N (k = N / 2).
struct CounterStats {
  std::uint32_t N = 0;
  std::uint32_t m_bits = 0;
  double mean_unrank_updates = 0.0;
  double mean_rank_updates = 0.0;
  std::uint64_t max_unrank_updates = 0;
  std::uint64_t max_rank_updates = 0;
  double mean_unrank_builds = 0.0;

  // Step-count throughputs: bits mapped per counter update. A selector
  // scales only if these do not drift toward zero as N grows.
  double map_bits_per_update() const {
    return static_cast<double>(m_bits) / mean_unrank_updates;
  }
  double demap_bits_per_update() const {
    return static_cast<double>(m_bits) / mean_rank_updates;
  }
};

std::vector<CounterStats> measure_counters(
    const std::vector<std::uint32_t>& n_values, const IndexSelector& sel,
    std::size_t reps, std::uint64_t seed);

/// CSV with the fixed header
/// N,m_bits,se_gain,mapper,runtime_us,delta_us,throughput_mbps,samples
/// se_gain truncated to two decimals; times and throughput to two decimals.
void write_csv(std::ostream& out, const std::vector<ThroughputRecord>& rows);

/// Full sample arrays plus record metadata, for external plotting.
void write_json(std::ostream& out, const std::vector<ThroughputRecord>& rows,
                const CampaignLog& log);

}  // namespace ofdmim
