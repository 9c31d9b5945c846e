#include "ofdmim/bench.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using namespace ofdmim;

TEST_CASE("log-log slope fitting recovers synthetic exponents") {
  const std::vector<double> n = {64, 128, 256, 512};
  std::vector<double> quadratic, linear, scaled;
  for (const double v : n) {
    quadratic.push_back(3.5 * v * v);
    linear.push_back(0.25 * v);
    scaled.push_back(7.0 * std::pow(v, 1.5));
  }
  CHECK(fit_scaling(n, quadratic) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit_scaling(n, linear) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit_scaling(n, scaled) == doctest::Approx(1.5).epsilon(1e-9));

  CHECK_THROWS_AS(fit_scaling({64, 128, 256}, {1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_scaling(n, {1, 2, 3, 0}), std::invalid_argument);
}

TEST_CASE("confidence half-width matches tabulated Student-t values") {
  // df = 9, 95%: t = 2.262157
  CHECK(students_t_half_width(10, 4.0, 0.95) ==
        doctest::Approx(2.262157 * std::sqrt(4.0 / 10.0)).epsilon(1e-5));
  // df = 1, 95%: t = 12.7062
  CHECK(students_t_half_width(2, 1.0, 0.95) ==
        doctest::Approx(12.7062 * std::sqrt(1.0 / 2.0)).epsilon(1e-4));
  // df = 29, 99%: t = 2.756386
  CHECK(students_t_half_width(30, 9.0, 0.99) ==
        doctest::Approx(2.756386 * 3.0 / std::sqrt(30.0)).epsilon(1e-5));

  CHECK(students_t_half_width(1, 4.0, 0.95) == 0.0);  // no variance estimate
  CHECK(students_t_half_width(50, 0.0, 0.95) == 0.0);  // identical samples
}

TEST_CASE("kappa follows directly from the record") {
  ThroughputRecord r;
  r.m_bits = 89;
  r.runtime_us = 89.0 / 75.0;  // 75 Mbps
  CHECK(estimate_kappa(r).kappa_us == doctest::Approx(0.02));

  r.runtime_us *= 2.0;  // doubling runtime at fixed m doubles kappa
  CHECK(estimate_kappa(r).kappa_us == doctest::Approx(0.04));
}

TEST_CASE("deterministic input bits per seed") {
  const BitBuffer a = random_bits(1000, 7);
  const BitBuffer b = random_bits(1000, 7);
  const BitBuffer c = random_bits(1000, 8);
  CHECK(a == b);
  CHECK(a.size() == 1000);
  CHECK_FALSE(a == c);
}

TEST_CASE("timed samples: positivity, structure, counter determinism") {
  const ImConfig cfg = ImConfig::make(4, 1, 2, 2);
  const RuntimeSample s1 = time_once(cfg, original_selector(), 11,
                                     Direction::map);
  CHECK(s1.seconds > 0.0);
  CHECK(s1.ops.from_scratch_builds >= 1);

  const RuntimeSample s2 = time_once(cfg, original_selector(), 11,
                                     Direction::map);
  CHECK(s1.ops.coeff_updates == s2.ops.coeff_updates);
  CHECK(s1.ops.from_scratch_builds == s2.ops.from_scratch_builds);

  // On identical input, the quadratic selector spends more counted work.
  const ImConfig wide = ImConfig::make(64, 1, 32, 2);
  const RuntimeSample orig = time_once(wide, original_selector(), 5,
                                       Direction::map);
  const RuntimeSample lin = time_once(wide, linear_selector(), 5,
                                      Direction::map);
  CHECK(orig.ops.coeff_updates > lin.ops.coeff_updates);
  CHECK(lin.ops.coeff_updates <= 64 + 32);

  const RuntimeSample dm = time_once(wide, linear_selector(), 5,
                                     Direction::demap);
  CHECK(dm.seconds > 0.0);
  CHECK(dm.ops.from_scratch_builds <= 1);
}

TEST_CASE("campaign records satisfy the throughput identity") {
  CampaignOptions opt;
  opt.warmup = 2;
  opt.min_samples = 4;
  opt.max_samples = 24;
  const auto records = run_campaign({4, 8}, {&original_selector(),
                                             &linear_selector()},
                                    Direction::map, opt);
  REQUIRE(records.size() == 4);
  for (const ThroughputRecord& r : records) {
    CHECK(r.runtime_us > 0.0);
    CHECK(r.samples >= opt.min_samples);
    CHECK(r.throughput_mbps ==
          doctest::Approx(r.m_bits / r.runtime_us).epsilon(1e-12));
    CHECK(r.delta_us >= 0.0);
  }
  CHECK(records[0].m_bits == 4);   // N=4 maps 4 bits
  CHECK(records[2].m_bits == 10);  // N=8 maps 10 bits
}

TEST_CASE("campaign flags non-convergence instead of hiding it") {
  CampaignOptions opt;
  opt.warmup = 0;
  opt.min_samples = 64;  // unreachable before the cap
  opt.max_samples = 3;
  const auto records =
      run_campaign({4}, {&linear_selector()}, Direction::demap, opt);
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].converged);
  CHECK(records[0].samples == 3);
}

TEST_CASE("campaign rejects invalid widths") {
  CampaignOptions opt;
  CHECK_THROWS_AS(run_campaign({3}, {&linear_selector()}, Direction::map, opt),
                  std::invalid_argument);
}

TEST_CASE("CSV uses the fixed header and two-decimal formatting") {
  ThroughputRecord r;
  r.N = 8;
  r.m_bits = 10;
  r.se_gain = 1.25;
  r.mapper = "linear";
  r.runtime_us = 2.0;
  r.delta_us = 0.105;
  r.throughput_mbps = 5.0;
  r.samples = 12;

  // The table anchor: 89 bits over 1.36 us is 65.44 Mbps at two decimals.
  ThroughputRecord wide;
  wide.N = 62;
  wide.m_bits = 89;
  wide.se_gain = 89.0 / 62.0;
  wide.mapper = "linear";
  wide.runtime_us = 1.36;
  wide.delta_us = 0.003;
  wide.throughput_mbps = wide.m_bits / wide.runtime_us;
  wide.samples = 1548;

  std::stringstream out;
  write_csv(out, {r, wide});
  CHECK(out.str() ==
        "N,m_bits,se_gain,mapper,runtime_us,delta_us,throughput_mbps,"
        "samples\n"
        "8,10,1.25,linear,2.00,0.10,5.00,12\n"
        "62,89,1.43,linear,1.36,0.00,65.44,1548\n");
}

TEST_CASE("counter measurements expose the asymptotic gap") {
  const std::vector<std::uint32_t> widths = {64, 128, 256, 512};
  const auto orig = measure_counters(widths, original_selector(), 24, 1);
  const auto lin = measure_counters(widths, linear_selector(), 24, 1);
  REQUIRE(orig.size() == 4);
  REQUIRE(lin.size() == 4);

  std::vector<double> xs, orig_updates, lin_updates;
  for (std::size_t j = 0; j < widths.size(); ++j) {
    xs.push_back(widths[j]);
    orig_updates.push_back(orig[j].mean_unrank_updates);
    lin_updates.push_back(lin[j].mean_unrank_updates);
    CHECK(lin[j].max_unrank_updates <= widths[j] + widths[j] / 2);
    CHECK(lin[j].max_rank_updates <= widths[j] + widths[j] / 2);
    CHECK(lin[j].mean_unrank_builds == doctest::Approx(1.0));
  }
  CHECK(fit_scaling(xs, orig_updates) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(fit_scaling(xs, lin_updates) == doctest::Approx(1.0).epsilon(0.2));

  // Step-count throughput: the linear selector stays in a bounded band
  // while the quadratic one drifts toward zero.
  CHECK(lin.back().map_bits_per_update() >
        0.5 * lin.front().map_bits_per_update());
  CHECK(orig.back().map_bits_per_update() <
        0.5 * orig.front().map_bits_per_update());
  CHECK(lin.back().demap_bits_per_update() >
        0.5 * lin.front().demap_bits_per_update());
}

TEST_CASE("JSON emission carries records and sample arrays") {
  CampaignOptions opt;
  opt.warmup = 1;
  opt.min_samples = 4;
  opt.max_samples = 8;
  CampaignLog log;
  const auto records =
      run_campaign({4}, {&linear_selector()}, Direction::map, opt, &log);
  std::stringstream out;
  write_json(out, records, log);

  const auto doc = nlohmann::json::parse(out.str());
  REQUIRE(doc["records"].size() == 1);
  CHECK(doc["records"][0]["N"] == 4);
  CHECK(doc["records"][0]["mapper"] == "linear");
  CHECK(doc["samples_us"][0].size() == records[0].samples);
}
