#include "ofdmim/codec.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ofdmim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::uint32_t bits_per_sample(std::uint32_t M) { return M == 2 ? 1 : 2; }

}  // namespace

ImConfig ImConfig::make(std::uint32_t N, std::uint32_t g, std::uint32_t k,
                        std::uint32_t M) {
  if (N == 0) throw std::invalid_argument("config: N must be positive");
  if (g == 0) throw std::invalid_argument("config: g must be positive");
  if (N % g != 0) {
    throw std::invalid_argument("config: g must divide N exactly");
  }
  const std::uint32_t n = N / g;
  if (k < 1 || k > n) {
    throw std::invalid_argument("config: k must satisfy 1 <= k <= n");
  }
  if (k == n) {
    throw std::invalid_argument(
        "config: k = n admits a single index pattern (no index bits)");
  }
  if (M != 2 && M != 4) {
    throw std::invalid_argument("config: M must be 2 (BPSK) or 4 (QPSK)");
  }
  ImConfig cfg;
  cfg.N = N;
  cfg.g = g;
  cfg.n = n;
  cfg.k = k;
  cfg.M = M;
  return cfg;
}

SymbolParams derive_params(const ImConfig& cfg) {
  SymbolParams sp;
  sp.p1 = p1_bits(cfg.n, cfg.k);
  sp.p2 = cfg.k * bits_per_sample(cfg.M);
  sp.p = sp.p1 + sp.p2;
  sp.m = cfg.g * sp.p;
  sp.se_gain = static_cast<double>(sp.m) / static_cast<double>(cfg.N);
  return sp;
}

std::string format_se_gain(std::uint32_t m_bits, std::uint32_t N) {
  const std::uint64_t hundredths =
      (static_cast<std::uint64_t>(m_bits) * 100u) / N;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu.%02llu",
                static_cast<unsigned long long>(hundredths / 100),
                static_cast<unsigned long long>(hundredths % 100));
  return buf;
}

void BitBuffer::append_field(std::uint64_t value, std::uint32_t width) {
  for (std::uint32_t j = 0; j < width; ++j) {
    bits.push_back(static_cast<std::uint8_t>((value >> (width - 1 - j)) & 1u));
  }
}

void BitBuffer::append_nat(const ExactNat& value, std::uint32_t width) {
  if (bit_length(value) > width) {
    throw std::invalid_argument("bit buffer: value does not fit field width");
  }
  for (std::uint32_t j = 0; j < width; ++j) {
    bits.push_back(static_cast<std::uint8_t>(
        mpz_tstbit(value.get_mpz_t(), width - 1 - j)));
  }
}

std::uint64_t BitBuffer::field(std::size_t pos, std::uint32_t width) const {
  if (width > 64 || pos + width > bits.size()) {
    throw std::out_of_range("bit buffer: field out of range");
  }
  std::uint64_t v = 0;
  for (std::uint32_t j = 0; j < width; ++j) {
    v = (v << 1) | bits[pos + j];
  }
  return v;
}

ExactNat BitBuffer::nat(std::size_t pos, std::uint32_t width) const {
  if (pos + width > bits.size()) {
    throw std::out_of_range("bit buffer: field out of range");
  }
  const std::size_t nbytes = (width + 7) / 8;
  std::vector<std::uint8_t> buf(nbytes, 0);
  const std::size_t lead = nbytes * 8 - width;
  for (std::uint32_t j = 0; j < width; ++j) {
    if (bits[pos + j]) {
      const std::size_t b = lead + j;
      buf[b / 8] |= static_cast<std::uint8_t>(0x80u >> (b % 8));
    }
  }
  ExactNat v;
  mpz_import(v.get_mpz_t(), nbytes, 1, 1, 0, 0, buf.data());
  return v;
}

BitBuffer read_bit_file(const std::string& path, std::size_t nbits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open bit file: " + path);
  const std::size_t nbytes = (nbits + 7) / 8;
  std::vector<char> raw(nbytes);
  in.read(raw.data(), static_cast<std::streamsize>(nbytes));
  if (static_cast<std::size_t>(in.gcount()) != nbytes) {
    throw std::runtime_error("bit file shorter than requested bit count: " +
                             path);
  }
  BitBuffer out;
  out.bits.reserve(nbits);
  for (std::size_t j = 0; j < nbits; ++j) {
    const auto byte = static_cast<std::uint8_t>(raw[j / 8]);
    out.bits.push_back(static_cast<std::uint8_t>((byte >> (7 - j % 8)) & 1u));
  }
  return out;
}

void write_bit_file(const std::string& path, const BitBuffer& bits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open bit file: " + path);
  const std::size_t nbytes = (bits.size() + 7) / 8;
  std::vector<std::uint8_t> raw(nbytes, 0);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits.bits[j]) {
      raw[j / 8] |= static_cast<std::uint8_t>(0x80u >> (j % 8));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(nbytes));
  if (!out) throw std::runtime_error("cannot write bit file: " + path);
}

ComplexSample modulate(std::uint32_t value, std::uint32_t M) {
  if (M == 2) {
    if (value > 1) {
      throw std::invalid_argument("modulate: BPSK field must be one bit");
    }
    return value == 0 ? ComplexSample(1.0, 0.0) : ComplexSample(-1.0, 0.0);
  }
  if (M == 4) {
    switch (value) {
      case 0: return {+kInvSqrt2, +kInvSqrt2};
      case 1: return {+kInvSqrt2, -kInvSqrt2};
      case 2: return {-kInvSqrt2, +kInvSqrt2};
      case 3: return {-kInvSqrt2, -kInvSqrt2};
      default:
        throw std::invalid_argument("modulate: QPSK field must be two bits");
    }
  }
  throw std::invalid_argument("modulate: unsupported constellation size");
}

std::uint32_t demodulate(ComplexSample s, std::uint32_t M) {
  if (M != 2 && M != 4) {
    throw std::invalid_argument("demodulate: unsupported constellation size");
  }
  for (std::uint32_t v = 0; v < M; ++v) {
    if (std::abs(s - modulate(v, M)) <= constellation_tolerance()) {
      return v;
    }
  }
  throw MalformedSymbolError(0, "sample is not a constellation point");
}

FrequencySymbol map_symbol(const BitBuffer& bits, const ImConfig& cfg,
                           const IndexSelector& sel, OpCounter* ops) {
  const SymbolParams sp = derive_params(cfg);
  if (bits.size() != sp.m) {
    throw std::invalid_argument(
        "map_symbol: expected " + std::to_string(sp.m) + " bits, got " +
        std::to_string(bits.size()));
  }
  const std::uint32_t bps = bits_per_sample(cfg.M);

  FrequencySymbol sym;
  sym.config = cfg;
  sym.samples.assign(cfg.N, ComplexSample(0.0, 0.0));

  OpCounter local;
  for (std::uint32_t beta = 0; beta < cfg.g; ++beta) {
    const std::size_t off = static_cast<std::size_t>(beta) * sp.p;
    const ExactNat x = bits.nat(off, sp.p1);
    const IndexCoefficients idx = sel.unrank(x, cfg.n, cfg.k, local);
    if (ops != nullptr) *ops += local;

    // Constellation bits go to the active subcarriers in ascending local
    // index order; the coefficients are stored largest first.
    std::size_t t = 0;
    for (auto it = idx.coeffs.rbegin(); it != idx.coeffs.rend(); ++it, ++t) {
      const auto value = static_cast<std::uint32_t>(
          bits.field(off + sp.p1 + t * bps, bps));
      sym.samples[static_cast<std::size_t>(beta) * cfg.n + *it] =
          modulate(value, cfg.M);
    }
  }
  return sym;
}

BitBuffer demap_symbol(const FrequencySymbol& sym, const ImConfig& cfg,
                       const IndexSelector& sel, OpCounter* ops) {
  if (sym.config != cfg) {
    throw std::invalid_argument(
        "demap_symbol: symbol was produced under a different config");
  }
  if (sym.samples.size() != cfg.N) {
    throw MalformedSymbolError(0, "sample count differs from N");
  }
  const SymbolParams sp = derive_params(cfg);
  const std::uint32_t bps = bits_per_sample(cfg.M);

  BitBuffer out;
  out.bits.reserve(sp.m);

  OpCounter local;
  std::vector<std::uint32_t> active;
  for (std::uint32_t beta = 0; beta < cfg.g; ++beta) {
    const std::size_t base = static_cast<std::size_t>(beta) * cfg.n;
    active.clear();
    for (std::uint32_t j = 0; j < cfg.n; ++j) {
      if (sym.samples[base + j] != ComplexSample(0.0, 0.0)) {
        active.push_back(j);
      }
    }
    if (active.size() != cfg.k) {
      throw MalformedSymbolError(
          beta + 1, "subblock " + std::to_string(beta + 1) + ": expected " +
                        std::to_string(cfg.k) + " active samples, found " +
                        std::to_string(active.size()));
    }

    IndexCoefficients idx;
    idx.coeffs.assign(active.rbegin(), active.rend());
    const ExactNat x = sel.rank(idx, cfg.n, cfg.k, local);
    if (ops != nullptr) *ops += local;
    if (bit_length(x) > sp.p1) {
      // A valid k-subset, but outside the 2^p1 patterns the mapper can emit.
      throw MalformedSymbolError(
          beta + 1, "subblock " + std::to_string(beta + 1) +
                        ": index pattern outside the mappable range");
    }
    out.append_nat(x, sp.p1);

    for (const std::uint32_t j : active) {
      std::uint32_t value = 0;
      try {
        value = demodulate(sym.samples[base + j], cfg.M);
      } catch (const MalformedSymbolError& e) {
        throw MalformedSymbolError(
            beta + 1, "subblock " + std::to_string(beta + 1) + ": " +
                          e.what());
      }
      out.append_field(value, bps);
    }
  }
  return out;
}

namespace {

IndexCoefficients selector_unrank_original(const ExactNat& x, std::uint32_t n,
                                           std::uint32_t k, OpCounter& ops) {
  return unrank_original(x, n, k, ops);
}

ExactNat selector_rank_original(const IndexCoefficients& c, std::uint32_t n,
                                std::uint32_t k, OpCounter& ops) {
  return rank_original(c, n, k, ops);
}

IndexCoefficients selector_unrank_linear(const ExactNat& x, std::uint32_t n,
                                         std::uint32_t k, OpCounter& ops) {
  return unrank_linear(x, n, k, ops);
}

ExactNat selector_rank_linear(const IndexCoefficients& c, std::uint32_t n,
                              std::uint32_t k, OpCounter& ops) {
  return rank_linear(c, n, k, ops);
}

}  // namespace

const IndexSelector& original_selector() {
  static const IndexSelector sel{"original", &selector_unrank_original,
                                 &selector_rank_original};
  return sel;
}

const IndexSelector& linear_selector() {
  static const IndexSelector sel{"linear", &selector_unrank_linear,
                                 &selector_rank_linear};
  return sel;
}

const IndexSelector* find_selector(std::string_view name) {
  if (name == "original") return &original_selector();
  if (name == "linear") return &linear_selector();
  return nullptr;
}

void write_symbol(std::ostream& out, const FrequencySymbol& sym) {
  const ImConfig& c = sym.config;
  out << "# N=" << c.N << " g=" << c.g << " k=" << c.k << " M=" << c.M << "\n";
  char line[96];
  for (std::size_t j = 0; j < sym.samples.size(); ++j) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", j,
                  sym.samples[j].real(), sym.samples[j].imag());
    out << line;
  }
}

FrequencySymbol read_symbol(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("symbol file: missing header line");
  }
  unsigned N = 0, g = 0, k = 0, M = 0;
  if (std::sscanf(header.c_str(), "# N=%u g=%u k=%u M=%u", &N, &g, &k, &M) !=
      4) {
    throw std::runtime_error("symbol file: malformed header line");
  }

  FrequencySymbol sym;
  sym.config = ImConfig::make(N, g, k, M);
  sym.samples.reserve(N);

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    unsigned long index = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lu,%lf,%lf", &index, &re, &im) != 3) {
      throw std::runtime_error("symbol file: malformed sample line: " + line);
    }
    if (index != sym.samples.size()) {
      throw std::runtime_error("symbol file: sample index out of order");
    }
    sym.samples.emplace_back(re, im);
  }
  if (sym.samples.size() != N) {
    throw std::runtime_error("symbol file: expected " + std::to_string(N) +
                             " samples, found " +
                             std::to_string(sym.samples.size()));
  }
  return sym;
}

void write_symbol_file(const std::string& path, const FrequencySymbol& sym) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open symbol file: " + path);
  write_symbol(out, sym);
  if (!out) throw std::runtime_error("cannot write symbol file: " + path);
}

FrequencySymbol read_symbol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open symbol file: " + path);
  return read_symbol(in);
}

}  // namespace ofdmim
