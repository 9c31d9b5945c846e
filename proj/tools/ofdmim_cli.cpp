// Command-line front end: params, map, demap, verify, and bench subcommands.
// Every failure path prints a single "error[<code>]: ..." line on stderr and
// exits nonzero; benchmark non-convergence is a flagged report, not an error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ofdmim/bench.hpp"
#include "ofdmim/codec.hpp"
#include "ofdmim/combinadic.hpp"

namespace {

using namespace ofdmim;

int fail(const char* code, const std::string& msg) {
  std::cerr << "error[" << code << "]: " << msg << "\n";
  return 1;
}

struct ConfigFlags {
  std::uint32_t N = 0;
  std::uint32_t g = 1;
  std::uint32_t k = 0;
  std::uint32_t M = 2;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--N", f.N, "Subcarriers per symbol")->required();
  cmd->add_option("--g", f.g, "Subblocks per symbol")->capture_default_str();
  cmd->add_option("--k", f.k, "Active subcarriers per subblock")->required();
  cmd->add_option("--M", f.M, "Constellation size (2 or 4)")->capture_default_str();
}

// "start:stop:step" ranges and comma lists, e.g. "2:62:2" or "64,128,256".
std::vector<std::uint32_t> parse_n_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    unsigned long a = 0, b = 0, s = 0;
    if (std::sscanf(token.c_str(), "%lu:%lu:%lu", &a, &b, &s) == 3) {
      if (s == 0) throw std::invalid_argument("N range step must be positive");
      for (unsigned long v = a; v <= b; v += s) {
        out.push_back(static_cast<std::uint32_t>(v));
      }
    } else if (std::sscanf(token.c_str(), "%lu", &a) == 1 &&
               token.find(':') == std::string::npos) {
      out.push_back(static_cast<std::uint32_t>(a));
    } else {
      throw std::invalid_argument("cannot parse N list token: " + token);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty N list");
  return out;
}

std::vector<const IndexSelector*> parse_selectors(const std::string& text) {
  std::vector<const IndexSelector*> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const IndexSelector* sel = find_selector(token);
    if (sel == nullptr) {
      throw std::invalid_argument("unknown selector: " + token);
    }
    out.push_back(sel);
  }
  if (out.empty()) throw std::invalid_argument("empty selector list");
  return out;
}

// out.csv -> out.mapper.csv / out.demapper.csv
std::string with_direction_suffix(const std::string& path, Direction dir) {
  const std::string tag = dir == Direction::map ? ".mapper" : ".demapper";
  const std::size_t dot = path.rfind('.');
  const std::size_t slash = path.find_last_of('/');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return path + tag + ".csv";
  }
  return path.substr(0, dot) + tag + path.substr(dot);
}

int cmd_params(const ConfigFlags& f) {
  ImConfig cfg;
  SymbolParams sp;
  try {
    cfg = ImConfig::make(f.N, f.g, f.k, f.M);
    sp = derive_params(cfg);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }
  const ExactNat waveforms = ExactNat(1) << sp.p1;
  std::cout << "N=" << cfg.N << " g=" << cfg.g << " n=" << cfg.n
            << " k=" << cfg.k << " M=" << cfg.M << "\n"
            << "p1=" << sp.p1 << "\n"
            << "p2=" << sp.p2 << "\n"
            << "p=" << sp.p << "\n"
            << "m=" << sp.m << "\n"
            << "se_gain=" << format_se_gain(sp.m, cfg.N) << "\n"
            << "combinations=" << binom(cfg.n, cfg.k) << "\n"
            << "waveforms_per_subblock=" << waveforms << "\n";
  return 0;
}

int cmd_map(const ConfigFlags& f, const std::string& bits_path,
            std::size_t nbits, const std::string& selector,
            const std::string& out_path) {
  ImConfig cfg;
  SymbolParams sp;
  try {
    cfg = ImConfig::make(f.N, f.g, f.k, f.M);
    sp = derive_params(cfg);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }
  if (nbits != sp.m) {
    return fail("bitcount", "config maps " + std::to_string(sp.m) +
                                " bits per symbol, --nbits gave " +
                                std::to_string(nbits));
  }
  const IndexSelector* sel = find_selector(selector);
  if (sel == nullptr) return fail("config", "unknown selector: " + selector);
  try {
    const BitBuffer bits = read_bit_file(bits_path, nbits);
    const FrequencySymbol sym = map_symbol(bits, cfg, *sel);
    write_symbol_file(out_path, sym);
  } catch (const std::runtime_error& e) {
    return fail("io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }
  std::cout << "mapped " << sp.m << " bits into " << cfg.N << " samples -> "
            << out_path << "\n";
  return 0;
}

int cmd_demap(const ConfigFlags& f, const std::string& symbol_path,
              const std::string& selector, const std::string& out_path) {
  ImConfig cfg;
  SymbolParams sp;
  try {
    cfg = ImConfig::make(f.N, f.g, f.k, f.M);
    sp = derive_params(cfg);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }
  const IndexSelector* sel = find_selector(selector);
  if (sel == nullptr) return fail("config", "unknown selector: " + selector);

  FrequencySymbol sym;
  try {
    sym = read_symbol_file(symbol_path);
  } catch (const std::runtime_error& e) {
    return fail("io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }
  if (sym.config != cfg) {
    return fail("config", "symbol file header disagrees with the flags");
  }
  try {
    const BitBuffer bits = demap_symbol(sym, cfg, *sel);
    write_bit_file(out_path, bits);
  } catch (const MalformedSymbolError& e) {
    return fail("malformed-symbol", e.what());
  } catch (const std::runtime_error& e) {
    return fail("io", e.what());
  }
  std::cout << "demapped " << cfg.N << " samples into " << sp.m << " bits -> "
            << out_path << "\n";
  return 0;
}

int cmd_verify(std::uint32_t max_n, std::uint64_t case_limit) {
  VerifyReport report;
  try {
    report = verify_sweep(max_n, case_limit);
  } catch (const std::domain_error& e) {
    return fail("oracle-guard", e.what());
  }
  if (!report.passed) {
    std::cerr << "error[verify-mismatch]: " << report.detail
              << " at n=" << report.fail_n << " k=" << report.fail_k
              << " X=" << report.fail_x << "\n";
    return 1;
  }
  std::cout << "verify: pass (" << report.cases_checked
            << " rank/unrank cases checked, max n=" << max_n << ")\n";
  return 0;
}

void print_wall_slopes(const std::vector<ThroughputRecord>& records,
                       const std::vector<const IndexSelector*>& selectors,
                       Direction dir) {
  for (const IndexSelector* sel : selectors) {
    std::vector<double> xs, ys;
    for (const ThroughputRecord& r : records) {
      if (r.mapper == sel->name) {
        xs.push_back(r.N);
        ys.push_back(r.runtime_us);
      }
    }
    if (xs.size() < 4) continue;
    std::printf("slope[%s %s runtime]=%.2f\n", to_string(dir), sel->name,
                fit_scaling(xs, ys));
  }
}

int cmd_bench(const std::string& n_list_text, const std::string& selector_text,
              std::size_t max_samples, std::size_t warmup, double precision,
              std::uint64_t seed, const std::string& csv_out,
              const std::string& json_out, bool counters_only,
              std::size_t reps) {
  std::vector<std::uint32_t> n_values;
  std::vector<const IndexSelector*> selectors;
  try {
    n_values = parse_n_list(n_list_text);
    selectors = parse_selectors(selector_text);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }

  if (counters_only) {
    // Hardware-independent scaling report from the operation counters.
    try {
      for (const IndexSelector* sel : selectors) {
        const auto stats = measure_counters(n_values, *sel, reps, seed);
        std::printf("# selector=%s seed=%llu\n", sel->name,
                    static_cast<unsigned long long>(seed));
        std::printf("N,m_bits,mean_unrank_updates,mean_rank_updates,"
                    "max_unrank_updates,max_rank_updates,"
                    "map_bits_per_update,demap_bits_per_update\n");
        std::vector<double> xs, unrank_ys, rank_ys;
        for (const CounterStats& st : stats) {
          std::printf("%u,%u,%.1f,%.1f,%llu,%llu,%.4f,%.4f\n", st.N,
                      st.m_bits, st.mean_unrank_updates, st.mean_rank_updates,
                      static_cast<unsigned long long>(st.max_unrank_updates),
                      static_cast<unsigned long long>(st.max_rank_updates),
                      st.map_bits_per_update(), st.demap_bits_per_update());
          xs.push_back(st.N);
          unrank_ys.push_back(st.mean_unrank_updates);
          rank_ys.push_back(st.mean_rank_updates);
        }
        if (xs.size() >= 4) {
          std::printf("slope[%s unrank updates]=%.2f\n", sel->name,
                      fit_scaling(xs, unrank_ys));
          std::printf("slope[%s rank updates]=%.2f\n", sel->name,
                      fit_scaling(xs, rank_ys));
        }
      }
    } catch (const std::invalid_argument& e) {
      return fail("config", e.what());
    }
    return 0;
  }

  CampaignOptions options;
  options.max_samples = max_samples;
  options.warmup = warmup;
  options.rel_precision = precision;
  options.seed = seed;

  std::vector<ThroughputRecord> all;
  try {
    for (const Direction dir : {Direction::map, Direction::demap}) {
      CampaignLog log;
      CampaignLog* log_ptr = json_out.empty() ? nullptr : &log;
      const auto records =
          run_campaign(n_values, selectors, dir, options, log_ptr);

      std::printf("== %s ==\n", dir == Direction::map ? "mapper" : "demapper");
      write_csv(std::cout, records);
      print_wall_slopes(records, selectors, dir);

      if (!csv_out.empty()) {
        const std::string path = with_direction_suffix(csv_out, dir);
        std::ofstream out(path);
        if (!out) return fail("io", "cannot open CSV output: " + path);
        write_csv(out, records);
      }
      if (!json_out.empty()) {
        const std::string path = with_direction_suffix(json_out, dir);
        std::ofstream out(path);
        if (!out) return fail("io", "cannot open JSON output: " + path);
        write_json(out, records, log);
      }
      all.insert(all.end(), records.begin(), records.end());
    }
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  }

  // Wall-time kappa per N for the linear mapper, with the campaign average.
  double kappa_sum = 0.0;
  std::size_t kappa_count = 0;
  for (const ThroughputRecord& r : all) {
    if (r.direction == Direction::map && r.mapper == "linear") {
      const KappaEstimate k = estimate_kappa(r);
      std::printf("kappa_us[N=%u]=%.4f\n", r.N, k.kappa_us);
      kappa_sum += k.kappa_us;
      ++kappa_count;
    }
  }
  if (kappa_count > 0) {
    std::printf("kappa_us[mean]=%.4f\n",
                kappa_sum / static_cast<double>(kappa_count));
  }

  std::size_t flagged = 0;
  for (const ThroughputRecord& r : all) {
    if (r.resolution_rejects > 0) {
      std::printf("resolution-warning: %s %s N=%u discarded %zu samples "
                  "shorter than 10x the clock resolution\n",
                  to_string(r.direction), r.mapper.c_str(), r.N,
                  r.resolution_rejects);
    }
    if (!r.converged) {
      ++flagged;
      std::printf("not-converged: %s %s N=%u delta_us=%.2f after %zu samples\n",
                  to_string(r.direction), r.mapper.c_str(), r.N, r.delta_us,
                  r.samples);
    }
  }
  std::printf("campaign: %zu records, %zu not converged, seed=%llu\n",
              all.size(), flagged, static_cast<unsigned long long>(seed));
  return 0;  // benchmarks are reports, not tests
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM-IM frequency-domain mapper/demapper and benchmark tool"};
  app.require_subcommand(1);

  ConfigFlags params_flags;
  CLI::App* params = app.add_subcommand(
      "params", "Print the bit accounting derived from one configuration");
  add_config_flags(params, params_flags);

  ConfigFlags map_flags;
  std::string map_bits_path, map_out, map_selector = "linear";
  std::size_t map_nbits = 0;
  CLI::App* map =
      app.add_subcommand("map", "Map a bit file onto a symbol file");
  add_config_flags(map, map_flags);
  map->add_option("--bits-file", map_bits_path, "Input bitstream (raw bytes)")
      ->required();
  map->add_option("--nbits", map_nbits, "Number of input bits")->required();
  map->add_option("--selector", map_selector, "original or linear")->capture_default_str();
  map->add_option("--out", map_out, "Output symbol file")->required();

  ConfigFlags demap_flags;
  std::string demap_symbol_path, demap_out, demap_selector = "linear";
  CLI::App* demap =
      app.add_subcommand("demap", "Demap a symbol file back into bits");
  add_config_flags(demap, demap_flags);
  demap->add_option("--symbol-file", demap_symbol_path, "Input symbol file")
      ->required();
  demap->add_option("--selector", demap_selector, "original or linear")->capture_default_str();
  demap->add_option("--out", demap_out, "Output bitstream (raw bytes)")
      ->required();

  std::uint32_t verify_max_n = 12;
  std::uint64_t verify_limit = 10'000'000;
  CLI::App* verify = app.add_subcommand(
      "verify", "Exhaustive bijection and oracle cross-check");
  verify->add_option("--max-n", verify_max_n, "Largest subblock width")->capture_default_str();
  verify->add_option("--exhaustive-limit", verify_limit,
                     "Total-case budget for the sweep")->capture_default_str();

  std::string bench_n_list = "2:62:2";
  std::string bench_selectors = "original,linear";
  std::string bench_csv, bench_json;
  std::size_t bench_max_samples = 20000, bench_warmup = 300, bench_reps = 64;
  double bench_precision = 0.05;
  std::uint64_t bench_seed = default_seed();
  bool bench_counters = false;
  CLI::App* bench = app.add_subcommand(
      "bench", "Timing campaigns (or --counters for operation counts)");
  bench->add_option("--n-list", bench_n_list,
                    "Comma list and/or start:stop:step ranges")->capture_default_str();
  bench->add_option("--selectors", bench_selectors, "Comma list")->capture_default_str();
  bench->add_option("--max-samples", bench_max_samples,
                    "Cap per (N, selector) before flagging")->capture_default_str();
  bench->add_option("--warmup", bench_warmup, "Discarded leading samples")->capture_default_str();
  bench->add_option("--precision", bench_precision,
                    "Relative CI half-width target")->capture_default_str();
  const std::string seed_help =
      "PRNG seed for input bits (presets: " +
      std::to_string(default_seed()) + ", " +
      std::to_string(alternate_seed_a()) + ", " +
      std::to_string(alternate_seed_b()) + ")";
  bench->add_option("--seed", bench_seed, seed_help)
      ->capture_default_str()
      ->envname("IMCODEC_SEED");
  bench->add_option("--csv-out", bench_csv,
                    "CSV base path (direction suffix is added)");
  bench->add_option("--json-out", bench_json,
                    "JSON base path with full sample arrays");
  bench->add_flag("--counters", bench_counters,
                  "Report operation counters instead of wall time");
  bench->add_option("--reps", bench_reps, "Inputs per N for --counters")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (params->parsed()) return cmd_params(params_flags);
    if (map->parsed()) {
      return cmd_map(map_flags, map_bits_path, map_nbits, map_selector,
                     map_out);
    }
    if (demap->parsed()) {
      return cmd_demap(demap_flags, demap_symbol_path, demap_selector,
                       demap_out);
    }
    if (verify->parsed()) return cmd_verify(verify_max_n, verify_limit);
    if (bench->parsed()) {
      return cmd_bench(bench_n_list, bench_selectors, bench_max_samples,
                       bench_warmup, bench_precision, bench_seed, bench_csv,
                       bench_json, bench_counters, bench_reps);
    }
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return fail("usage", "no subcommand given");
}
