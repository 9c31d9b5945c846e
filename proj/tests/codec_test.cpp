#include "ofdmim/codec.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "ofdmim/bench.hpp"

using namespace ofdmim;

namespace {

BitBuffer bits_from(const char* text) {
  BitBuffer b;
  for (const char* p = text; *p != '\0'; ++p) {
    b.append_bit(*p == '1' ? 1 : 0);
  }
  return b;
}

bool close(ComplexSample a, ComplexSample b) { return std::abs(a - b) < 1e-12; }

}  // namespace

TEST_CASE("config validation names the violated constraint") {
  CHECK_NOTHROW(ImConfig::make(8, 1, 4, 2));
  CHECK(ImConfig::make(8, 2, 2, 2).n == 4);

  CHECK_THROWS_WITH_AS(ImConfig::make(8, 3, 2, 2),
                       "config: g must divide N exactly",
                       std::invalid_argument);
  CHECK_THROWS_AS(ImConfig::make(8, 1, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(ImConfig::make(8, 1, 9, 2), std::invalid_argument);
  CHECK_THROWS_AS(ImConfig::make(8, 1, 8, 2), std::invalid_argument);
  CHECK_THROWS_AS(ImConfig::make(8, 1, 4, 3), std::invalid_argument);
  CHECK_THROWS_AS(ImConfig::make(8, 0, 4, 2), std::invalid_argument);
}

TEST_CASE("derived bit accounting matches the expected column values") {
  const SymbolParams a = derive_params(ImConfig::make(8, 1, 4, 2));
  CHECK(a.p1 == 6);
  CHECK(a.p2 == 4);
  CHECK(a.m == 10);
  CHECK(a.se_gain == doctest::Approx(1.25));

  const SymbolParams b = derive_params(ImConfig::make(62, 1, 31, 2));
  CHECK(b.m == 89);
  CHECK(format_se_gain(b.m, 62) == "1.43");

  const SymbolParams c = derive_params(ImConfig::make(2, 1, 1, 2));
  CHECK(c.p1 == 1);
  CHECK(c.p2 == 1);
  CHECK(c.m == 2);
  CHECK(format_se_gain(c.m, 2) == "1.00");

  // QPSK doubles the constellation bits.
  const SymbolParams d = derive_params(ImConfig::make(8, 1, 4, 4));
  CHECK(d.p2 == 8);
  CHECK(d.m == 14);
}

TEST_CASE("spectral-efficiency gain formatting truncates toward zero") {
  CHECK(format_se_gain(10, 8) == "1.25");
  CHECK(format_se_gain(21, 16) == "1.31");
  CHECK(format_se_gain(57, 40) == "1.42");
  CHECK(format_se_gain(89, 62) == "1.43");
  CHECK(format_se_gain(7, 6) == "1.16");
  CHECK(format_se_gain(42, 30) == "1.40");
  CHECK(format_se_gain(2, 2) == "1.00");
}

TEST_CASE("bit buffer fields are MSB first") {
  BitBuffer b;
  b.append_field(0b1011, 4);
  CHECK(b.bits == std::vector<std::uint8_t>{1, 0, 1, 1});
  CHECK(b.field(0, 4) == 11);
  CHECK(b.field(1, 2) == 0b01);

  b.append_nat(ExactNat(5), 3);
  CHECK(b.field(4, 3) == 5);
  CHECK(b.nat(0, 7) == (11 << 3 | 5));

  CHECK_THROWS_AS(b.field(4, 4), std::out_of_range);
  CHECK_THROWS_AS(b.append_nat(ExactNat(8), 3), std::invalid_argument);
}

TEST_CASE("wide fields round-trip through exact integers") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint32_t width = 1 + static_cast<std::uint32_t>(rng() % 300);
    BitBuffer original;
    for (std::uint32_t j = 0; j < width; ++j) {
      original.append_bit(static_cast<std::uint8_t>(rng() & 1));
    }
    const ExactNat value = original.nat(0, width);
    BitBuffer rebuilt;
    rebuilt.append_nat(value, width);
    CHECK(rebuilt == original);
  }
}

TEST_CASE("constellation anchors") {
  CHECK(close(modulate(0, 2), {1.0, 0.0}));
  CHECK(close(modulate(1, 2), {-1.0, 0.0}));

  const double s = std::sqrt(0.5);
  CHECK(close(modulate(0b00, 4), {+s, +s}));
  CHECK(close(modulate(0b01, 4), {+s, -s}));
  CHECK(close(modulate(0b11, 4), {-s, -s}));
  CHECK(close(modulate(0b10, 4), {-s, +s}));

  CHECK_THROWS_AS(modulate(0, 8), std::invalid_argument);
  CHECK_THROWS_AS(modulate(2, 2), std::invalid_argument);

  for (const std::uint32_t M : {2u, 4u}) {
    for (std::uint32_t v = 0; v < M; ++v) {
      CHECK(demodulate(modulate(v, M), M) == v);
      // Perturbations inside the tolerance still demodulate.
      CHECK(demodulate(modulate(v, M) + ComplexSample(1e-10, -1e-10), M) == v);
    }
  }
  CHECK_THROWS_AS(demodulate({0.5, 0.0}, 2), MalformedSymbolError);
  CHECK_THROWS_AS(demodulate({1.0 + 1e-6, 0.0}, 2), MalformedSymbolError);
}

TEST_CASE("worked mapping example: all-zero input") {
  const ImConfig cfg = ImConfig::make(4, 1, 2, 2);
  const FrequencySymbol sym =
      map_symbol(bits_from("0000"), cfg, linear_selector());
  REQUIRE(sym.samples.size() == 4);
  CHECK(close(sym.samples[0], {1.0, 0.0}));
  CHECK(close(sym.samples[1], {1.0, 0.0}));
  CHECK(close(sym.samples[2], {0.0, 0.0}));
  CHECK(close(sym.samples[3], {0.0, 0.0}));

  CHECK(demap_symbol(sym, cfg, linear_selector()) == bits_from("0000"));
}

TEST_CASE("worked mapping example: all-one input") {
  // Index field 11 -> rank 3 -> combination {0, 3} in colex order, so the
  // two -1 samples land on the outer subcarriers.
  const ImConfig cfg = ImConfig::make(4, 1, 2, 2);
  const FrequencySymbol sym =
      map_symbol(bits_from("1111"), cfg, original_selector());
  CHECK(close(sym.samples[0], {-1.0, 0.0}));
  CHECK(close(sym.samples[1], {0.0, 0.0}));
  CHECK(close(sym.samples[2], {0.0, 0.0}));
  CHECK(close(sym.samples[3], {-1.0, 0.0}));

  CHECK(demap_symbol(sym, cfg, original_selector()) == bits_from("1111"));
}

TEST_CASE("mapper rejects wrong bit counts") {
  const ImConfig cfg = ImConfig::make(4, 1, 2, 2);
  CHECK_THROWS_AS(map_symbol(bits_from("00000"), cfg, linear_selector()),
                  std::invalid_argument);
  CHECK_THROWS_AS(map_symbol(bits_from(""), cfg, linear_selector()),
                  std::invalid_argument);
}

TEST_CASE("demapper flags malformed symbols with the subblock index") {
  const ImConfig cfg = ImConfig::make(8, 2, 2, 2);
  const SymbolParams sp = derive_params(cfg);
  BitBuffer input;
  for (std::uint32_t j = 0; j < sp.m; ++j) input.append_bit(0);
  FrequencySymbol sym = map_symbol(input, cfg, linear_selector());

  SUBCASE("wrong active count") {
    sym.samples[6] = {1.0, 0.0};  // third active sample in subblock 2
    try {
      (void)demap_symbol(sym, cfg, linear_selector());
      FAIL("expected MalformedSymbolError");
    } catch (const MalformedSymbolError& e) {
      CHECK(e.subblock == 2);
      CHECK(std::string(e.what()).find("subblock 2") != std::string::npos);
    }
  }

  SUBCASE("sample off the constellation grid") {
    sym.samples[0] = {0.5, 0.0};
    try {
      (void)demap_symbol(sym, cfg, linear_selector());
      FAIL("expected MalformedSymbolError");
    } catch (const MalformedSymbolError& e) {
      CHECK(e.subblock == 1);
    }
  }

  SUBCASE("valid subset outside the mappable index range") {
    // {2, 3} ranks to 5 >= 2^2 in a width-4 subblock with two active
    // subcarriers, so no 2-bit index field can produce it.
    const ImConfig small = ImConfig::make(4, 1, 2, 2);
    FrequencySymbol unreachable;
    unreachable.config = small;
    unreachable.samples = {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
    CHECK_THROWS_AS((void)demap_symbol(unreachable, small, linear_selector()),
                    MalformedSymbolError);
  }

  SUBCASE("config mismatch") {
    const ImConfig other = ImConfig::make(8, 1, 4, 2);
    CHECK_THROWS_AS((void)demap_symbol(sym, other, linear_selector()),
                    std::invalid_argument);
  }
}

TEST_CASE("selector interchangeability and roundtrip over a mixed grid") {
  std::mt19937_64 rng(1234);
  const struct {
    std::uint32_t N, g, M;
  } grid[] = {{2, 1, 2},  {4, 1, 2},  {4, 1, 4},  {8, 2, 2},
              {12, 2, 4}, {16, 4, 2}, {32, 2, 2}, {64, 1, 2}};

  for (const auto& cell : grid) {
    const ImConfig cfg =
        ImConfig::make(cell.N, cell.g, cell.N / cell.g / 2, cell.M);
    const SymbolParams sp = derive_params(cfg);
    for (int rep = 0; rep < 200; ++rep) {
      const BitBuffer input = random_bits(sp.m, rng());
      const FrequencySymbol a = map_symbol(input, cfg, original_selector());
      const FrequencySymbol b = map_symbol(input, cfg, linear_selector());
      CAPTURE(cell.N);
      REQUIRE(a.samples == b.samples);

      std::size_t active = 0;
      for (const ComplexSample& s : a.samples) {
        if (s != ComplexSample(0.0, 0.0)) {
          ++active;
          CHECK(std::abs(std::abs(s) - 1.0) <= 1e-12);
        }
      }
      CHECK(active == std::size_t(cfg.g) * cfg.k);

      CHECK(demap_symbol(a, cfg, original_selector()) == input);
      CHECK(demap_symbol(b, cfg, linear_selector()) == input);
    }
  }
}

TEST_CASE("subblocks map independently") {
  const ImConfig cfg = ImConfig::make(12, 2, 3, 2);
  const SymbolParams sp = derive_params(cfg);
  const BitBuffer input = random_bits(sp.m, 99);
  const FrequencySymbol whole = map_symbol(input, cfg, linear_selector());

  const ImConfig one = ImConfig::make(cfg.n, 1, cfg.k, cfg.M);
  for (std::uint32_t beta = 0; beta < cfg.g; ++beta) {
    BitBuffer slice;
    for (std::uint32_t j = 0; j < sp.p; ++j) {
      slice.append_bit(input.bits[beta * sp.p + j]);
    }
    const FrequencySymbol part = map_symbol(slice, one, linear_selector());
    for (std::uint32_t j = 0; j < cfg.n; ++j) {
      CHECK(whole.samples[beta * cfg.n + j] == part.samples[j]);
    }
  }
}

TEST_CASE("one selector instance serves concurrent mappers") {
  const ImConfig cfg = ImConfig::make(32, 1, 16, 2);
  const SymbolParams sp = derive_params(cfg);
  const IndexSelector& shared = linear_selector();

  std::atomic<int> failures{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      for (int rep = 0; rep < 500; ++rep) {
        const BitBuffer input =
            random_bits(sp.m, static_cast<std::uint64_t>(t) * 10'000 + rep);
        OpCounter ops;  // caller-owned, one per thread
        const FrequencySymbol sym = map_symbol(input, cfg, shared, &ops);
        if (!(demap_symbol(sym, cfg, shared) == input)) ++failures;
      }
    });
  }
  for (std::thread& w : workers) w.join();
  CHECK(failures == 0);
}

TEST_CASE("symbol serialization round-trips exactly") {
  const ImConfig cfg = ImConfig::make(8, 2, 2, 4);
  const SymbolParams sp = derive_params(cfg);
  const FrequencySymbol sym =
      map_symbol(random_bits(sp.m, 3), cfg, linear_selector());

  std::stringstream text;
  write_symbol(text, sym);
  CHECK(text.str().substr(0, 17) == "# N=8 g=2 k=2 M=4");

  std::stringstream in(text.str());
  const FrequencySymbol back = read_symbol(in);
  CHECK(back.config == cfg);
  CHECK(back.samples == sym.samples);

  std::stringstream bad("# N=8 g=2 k=2\n");
  CHECK_THROWS_AS((void)read_symbol(bad), std::runtime_error);
  std::stringstream truncated("# N=8 g=2 k=2 M=4\n0,1,0\n");
  CHECK_THROWS_AS((void)read_symbol(truncated), std::runtime_error);
}

TEST_CASE("bit files pack MSB first with zero padding") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ofdmim_codec_test";
  fs::create_directories(dir);
  const std::string path = (dir / "bits.bin").string();

  const BitBuffer bits = bits_from("1011001011000");
  write_bit_file(path, bits);

  std::ifstream in(path, std::ios::binary);
  char raw[2];
  in.read(raw, 2);
  CHECK(static_cast<unsigned char>(raw[0]) == 0b10110010);
  CHECK(static_cast<unsigned char>(raw[1]) == 0b11000000);

  CHECK(read_bit_file(path, 13) == bits);
  CHECK_THROWS_AS((void)read_bit_file(path, 64), std::runtime_error);
  fs::remove_all(dir);
}
