#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ofdmim/combinadic.hpp"

namespace ofdmim {

/// Symbol-level configuration. Use make() so every instance satisfies the
/// invariants: g divides N, n = N / g, 1 <= k < n is implied by requiring at
/// least one index-modulated bit, and M is BPSK or QPSK.
struct ImConfig {
  std::uint32_t N = 0;  // subcarriers per symbol
  std::uint32_t g = 0;  // subblocks per symbol
  std::uint32_t n = 0;  // subcarriers per subblock (N / g)
  std::uint32_t k = 0;  // active subcarriers per subblock
  std::uint32_t M = 0;  // constellation size (2 = BPSK, 4 = QPSK)

  static ImConfig make(std::uint32_t N, std::uint32_t g, std::uint32_t k,
                       std::uint32_t M);

  bool operator==(const ImConfig&) const = default;
};

/// Per-symbol bit accounting derived from a valid config.
struct SymbolParams {
  std::uint32_t p1 = 0;   // index bits per subblock
  std::uint32_t p2 = 0;   // constellation bits per subblock (k * log2 M)
  std::uint32_t p = 0;    // p1 + p2
  std::uint32_t m = 0;    // bits per symbol, g * p
  double se_gain = 0.0;   // m / N
};

SymbolParams derive_params(const ImConfig& cfg);

/// Spectral-efficiency gain formatted to two decimals, truncated toward
/// zero. Computed from integers so the output is deterministic.
std::string format_se_gain(std::uint32_t m_bits, std::uint32_t N);

/// Ordered bit sequence. Multi-bit fields are read and written MSB first:
/// the first bit of a field is its most significant bit.
struct BitBuffer {
  std::vector<std::uint8_t> bits;  // one bit per element, each 0 or 1

  std::size_t size() const { return bits.size(); }
  void append_bit(std::uint8_t b) { bits.push_back(b & 1u); }
  void append_field(std::uint64_t value, std::uint32_t width);
  void append_nat(const ExactNat& value, std::uint32_t width);
  std::uint64_t field(std::size_t pos, std::uint32_t width) const;
  ExactNat nat(std::size_t pos, std::uint32_t width) const;

  bool operator==(const BitBuffer&) const = default;
};

/// Raw bitstream file: bytes consumed MSB first within each byte; the bit
/// count travels out of band since it need not be byte aligned.
BitBuffer read_bit_file(const std::string& path, std::size_t nbits);
void write_bit_file(const std::string& path, const BitBuffer& bits);

using ComplexSample = std::complex<double>;

/// N complex baseband samples; exactly k are nonzero inside every subblock.
struct FrequencySymbol {
  ImConfig config;
  std::vector<ComplexSample> samples;
};

/// Raised by the demapper and the symbol reader when a symbol violates the
/// sparsity or constellation invariants. subblock is 1-based; 0 means the
/// problem is not tied to one subblock.
struct MalformedSymbolError : std::runtime_error {
  MalformedSymbolError(std::uint32_t subblock_, const std::string& what_)
      : std::runtime_error(what_), subblock(subblock_) {}
  std::uint32_t subblock = 0;
};

/// Map a field value of log2(M) bits onto a unit-energy constellation point.
/// BPSK: 0 -> +1, 1 -> -1. QPSK is Gray coded: 00 -> (+s, +s), 01 -> (+s, -s),
/// 11 -> (-s, -s), 10 -> (-s, +s) with s = sqrt(1/2).
ComplexSample modulate(std::uint32_t value, std::uint32_t M);

/// Inverse of modulate. The sample must lie within constellation_tolerance()
/// of a constellation point, else MalformedSymbolError.
std::uint32_t demodulate(ComplexSample s, std::uint32_t M);

constexpr double constellation_tolerance() { return 1e-9; }

/// Pluggable index-selector callbacks: unranking on the transmit side,
/// ranking on the receive side. Instances are stateless; the caller owns the
/// per-invocation counters, so one selector may be shared across threads.
struct IndexSelector {
  const char* name;
  IndexCoefficients (*unrank)(const ExactNat& x, std::uint32_t n,
                              std::uint32_t k, OpCounter& ops);
  ExactNat (*rank)(const IndexCoefficients& c, std::uint32_t n,
                   std::uint32_t k, OpCounter& ops);
};

const IndexSelector& original_selector();
const IndexSelector& linear_selector();

/// Lookup by CLI name ("original" or "linear"); nullptr when unknown.
const IndexSelector* find_selector(std::string_view name);

/// Bits-to-symbol mapper. bits must hold exactly m bits. Per subblock, the
/// first p1 bits (MSB first) select the active subcarriers through
/// sel.unrank; the next p2 bits modulate the active subcarriers in ascending
/// local index order. Global index = subblock offset + local index.
/// When ops is non-null the selector costs of all subblocks accumulate there.
FrequencySymbol map_symbol(const BitBuffer& bits, const ImConfig& cfg,
                           const IndexSelector& sel, OpCounter* ops = nullptr);

/// Exact inverse of map_symbol on noiseless symbols. Nonzero samples are the
/// active set; anything off the constellation grid, a wrong active count, or
/// an index pattern outside the p1-bit range raises MalformedSymbolError.
BitBuffer demap_symbol(const FrequencySymbol& sym, const ImConfig& cfg,
                       const IndexSelector& sel, OpCounter* ops = nullptr);

/// Text serialization: header "# N=<N> g=<g> k=<k> M=<M>", then one line per
/// sample, "index,re,im", re/im round-trip exact.
void write_symbol(std::ostream& out, const FrequencySymbol& sym);
FrequencySymbol read_symbol(std::istream& in);

void write_symbol_file(const std::string& path, const FrequencySymbol& sym);
FrequencySymbol read_symbol_file(const std::string& path);

}  // namespace ofdmim
