#include "ofdmim/bench.hpp"

#include <time.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace ofdmim {

namespace {

// Consumed checksums end up here so the optimizer cannot discard the
// (de)mapping outputs.
volatile std::uint64_t g_sink = 0;

std::uint64_t checksum_symbol(const FrequencySymbol& sym) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (const ComplexSample& s : sym.samples) {
    std::uint64_t re = 0, im = 0;
    const double sr = s.real(), si = s.imag();
    std::memcpy(&re, &sr, sizeof re);
    std::memcpy(&im, &si, sizeof im);
    h = (h ^ re) * 0x100000001b3ull;
    h = (h ^ im) * 0x100000001b3ull;
  }
  return h;
}

std::uint64_t checksum_bits(const BitBuffer& bits) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (const std::uint8_t b : bits.bits) {
    h = (h ^ b) * 0x100000001b3ull;
  }
  return h;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double d = v - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (v - mean);
  }
  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
};

}  // namespace

double students_t_half_width(std::size_t samples, double variance,
                             double confidence) {
  if (samples < 2 || variance <= 0.0) return 0.0;
  boost::math::students_t dist(static_cast<double>(samples - 1));
  const double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  return t * std::sqrt(variance / static_cast<double>(samples));
}

const char* to_string(Direction d) {
  return d == Direction::map ? "map" : "demap";
}

double clock_resolution_seconds() {
  static const double res = [] {
    timespec ts{};
    if (clock_getres(CLOCK_MONOTONIC, &ts) != 0) {
      return 1e-6;  // pessimistic fallback
    }
    return static_cast<double>(ts.tv_sec) +
           static_cast<double>(ts.tv_nsec) * 1e-9;
  }();
  return res;
}

BitBuffer random_bits(std::size_t nbits, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BitBuffer out;
  out.bits.reserve(nbits);
  std::uint64_t word = 0;
  for (std::size_t j = 0; j < nbits; ++j) {
    if (j % 64 == 0) word = rng();
    out.bits.push_back(static_cast<std::uint8_t>((word >> (63 - j % 64)) & 1u));
  }
  return out;
}

RuntimeSample time_once(const ImConfig& cfg, const IndexSelector& sel,
                        std::uint64_t seed, Direction dir) {
  const SymbolParams sp = derive_params(cfg);
  const BitBuffer input = random_bits(sp.m, seed);

  RuntimeSample sample;
  if (dir == Direction::map) {
    const double t0 = now_seconds();
    const FrequencySymbol sym = map_symbol(input, cfg, sel, &sample.ops);
    const double t1 = now_seconds();
    sample.seconds = t1 - t0;
    g_sink = g_sink ^ checksum_symbol(sym);
  } else {
    const FrequencySymbol sym = map_symbol(input, cfg, sel);
    const double t0 = now_seconds();
    const BitBuffer bits = demap_symbol(sym, cfg, sel, &sample.ops);
    const double t1 = now_seconds();
    sample.seconds = t1 - t0;
    g_sink = g_sink ^ checksum_bits(bits);
  }
  sample.resolution_ok = clock_resolution_seconds() <= 0.1 * sample.seconds;
  return sample;
}

std::vector<ThroughputRecord> run_campaign(
    const std::vector<std::uint32_t>& n_values,
    const std::vector<const IndexSelector*>& selectors, Direction dir,
    const CampaignOptions& options, CampaignLog* log) {
  if (options.max_samples == 0) {
    throw std::invalid_argument("campaign: max_samples must be positive");
  }
  std::vector<ThroughputRecord> records;
  for (const std::uint32_t N : n_values) {
    if (N < 2 || N % 2 != 0) {
      throw std::invalid_argument(
          "campaign: N must be even and at least 2, got " + std::to_string(N));
    }
    const ImConfig cfg = ImConfig::make(N, 1, N / 2, 2);
    const SymbolParams sp = derive_params(cfg);

    for (const IndexSelector* sel : selectors) {
      std::uint64_t next_seed = options.seed;
      for (std::size_t w = 0; w < options.warmup; ++w) {
        (void)time_once(cfg, *sel, next_seed++, dir);
      }

      RunningStats stats;
      std::vector<double> kept_us;
      std::size_t rejects = 0;
      const std::size_t reject_cap = 1000 + 10 * options.max_samples;
      bool converged = false;
      double delta = 0.0;
      while (stats.count < options.max_samples) {
        const RuntimeSample s = time_once(cfg, *sel, next_seed++, dir);
        if (!s.resolution_ok) {
          if (++rejects > reject_cap) {
            throw std::runtime_error(
                "campaign: clock resolution too coarse to time N=" +
                std::to_string(N));
          }
          continue;
        }
        stats.add(s.seconds);
        if (log != nullptr) kept_us.push_back(s.seconds * 1e6);
        if (stats.count >= options.min_samples && stats.count >= 2) {
          delta = students_t_half_width(stats.count, stats.variance(),
                                        options.confidence);
          if (delta <= options.rel_precision * stats.mean) {
            converged = true;
            break;
          }
        }
      }
      if (!converged && stats.count >= 2) {
        delta = students_t_half_width(stats.count, stats.variance(),
                                       options.confidence);
      }

      ThroughputRecord rec;
      rec.N = N;
      rec.m_bits = sp.m;
      rec.se_gain = sp.se_gain;
      rec.mapper = sel->name;
      rec.direction = dir;
      rec.runtime_us = stats.mean * 1e6;
      rec.delta_us = delta * 1e6;
      rec.throughput_mbps = static_cast<double>(sp.m) / rec.runtime_us;
      rec.samples = stats.count;
      rec.converged = converged;
      rec.resolution_rejects = rejects;
      records.push_back(std::move(rec));
      if (log != nullptr) log->samples_us.push_back(std::move(kept_us));
    }
  }
  return records;
}

KappaEstimate estimate_kappa(const ThroughputRecord& record) {
  return {1.5 * record.runtime_us / static_cast<double>(record.m_bits)};
}

double fit_scaling(const std::vector<double>& n_values,
                   const std::vector<double>& metric) {
  if (n_values.size() != metric.size()) {
    throw std::invalid_argument("fit_scaling: size mismatch");
  }
  if (n_values.size() < 4) {
    throw std::invalid_argument("fit_scaling: need at least 4 points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto count = static_cast<double>(n_values.size());
  for (std::size_t j = 0; j < n_values.size(); ++j) {
    if (n_values[j] <= 0.0 || metric[j] <= 0.0) {
      throw std::invalid_argument("fit_scaling: values must be positive");
    }
    const double x = std::log(n_values[j]);
    const double y = std::log(metric[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::vector<CounterStats> measure_counters(
    const std::vector<std::uint32_t>& n_values, const IndexSelector& sel,
    std::size_t reps, std::uint64_t seed) {
  std::vector<CounterStats> out;
  out.reserve(n_values.size());
  OpCounter ops;
  for (const std::uint32_t N : n_values) {
    if (N < 2 || N % 2 != 0) {
      throw std::invalid_argument(
          "counters: N must be even and at least 2, got " + std::to_string(N));
    }
    const std::uint32_t k = N / 2;
    const std::uint32_t p1 = p1_bits(N, k);

    CounterStats st;
    st.N = N;
    st.m_bits = p1 + k;  // optimal configuration: g = 1, M = 2
    std::uint64_t sum_unrank = 0, sum_rank = 0, sum_builds = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      // Index-field inputs exactly as the mapper would draw them:
      // p1 random bits, so x < 2^p1 <= C(N, k).
      const BitBuffer field = random_bits(p1, seed + r);
      const ExactNat x = field.nat(0, p1);

      const IndexCoefficients c = sel.unrank(x, N, k, ops);
      sum_unrank += ops.coeff_updates;
      sum_builds += ops.from_scratch_builds;
      st.max_unrank_updates = std::max(st.max_unrank_updates,
                                       ops.coeff_updates);

      (void)sel.rank(c, N, k, ops);
      sum_rank += ops.coeff_updates;
      st.max_rank_updates = std::max(st.max_rank_updates, ops.coeff_updates);
    }
    const auto denom = static_cast<double>(reps);
    st.mean_unrank_updates = static_cast<double>(sum_unrank) / denom;
    st.mean_rank_updates = static_cast<double>(sum_rank) / denom;
    st.mean_unrank_builds = static_cast<double>(sum_builds) / denom;
    out.push_back(st);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ThroughputRecord>& rows) {
  out << "N,m_bits,se_gain,mapper,runtime_us,delta_us,throughput_mbps,"
         "samples\n";
  char buf[160];
  for (const ThroughputRecord& r : rows) {
    std::snprintf(buf, sizeof buf, "%u,%u,%s,%s,%.2f,%.2f,%.2f,%zu\n", r.N,
                  r.m_bits, format_se_gain(r.m_bits, r.N).c_str(),
                  r.mapper.c_str(), r.runtime_us, r.delta_us,
                  r.throughput_mbps, r.samples);
    out << buf;
  }
}

void write_json(std::ostream& out, const std::vector<ThroughputRecord>& rows,
                const CampaignLog& log) {
  nlohmann::json doc;
  doc["records"] = nlohmann::json::array();
  for (const ThroughputRecord& r : rows) {
    doc["records"].push_back({{"N", r.N},
                              {"m_bits", r.m_bits},
                              {"se_gain", r.se_gain},
                              {"mapper", r.mapper},
                              {"direction", to_string(r.direction)},
                              {"runtime_us", r.runtime_us},
                              {"delta_us", r.delta_us},
                              {"throughput_mbps", r.throughput_mbps},
                              {"samples", r.samples},
                              {"converged", r.converged}});
  }
  doc["samples_us"] = log.samples_us;
  out << doc.dump(2) << "\n";
}

}  // namespace ofdmim
