#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ofdmim {

/// Arbitrary-precision unsigned integer. All ranking arithmetic runs on
/// exact values; nothing wraps or truncates. Large enough to hold central
/// binomial coefficients for symbols of at least 4096 subcarriers.
using ExactNat = mpz_class;

/// Exact bit length of v (0 has length 0).
std::size_t bit_length(const ExactNat& v);

/// RAM-model cost counters for one ranking/unranking invocation.
///
/// coeff_updates counts multiply/divide pairs applied to a running binomial
/// value; from_scratch_builds counts full multiplicative-product evaluations.
/// Counters are the hardware-independent proxy used for scaling checks,
/// since wall time of big-integer operations is not constant per step.
struct OpCounter {
  std::uint64_t coeff_updates = 0;
  std::uint64_t from_scratch_builds = 0;

  void reset() { coeff_updates = 0; from_scratch_builds = 0; }
  OpCounter& operator+=(const OpCounter& o) {
    coeff_updates += o.coeff_updates;
    from_scratch_builds += o.from_scratch_builds;
    return *this;
  }
};

/// Indexes of the k active subcarriers of one subblock, stored largest
/// first: coeffs[0] = c_k > coeffs[1] = c_(k-1) > ... > coeffs[k-1] = c_1 >= 0,
/// with c_k <= n - 1.
struct IndexCoefficients {
  std::vector<std::uint32_t> coeffs;

  std::size_t size() const { return coeffs.size(); }
  bool operator==(const IndexCoefficients&) const = default;
};

/// C(n, k) by the running product: multiply by (n - i + 1), then divide by i,
/// for i = 1..k. Every intermediate division is exact (the product of i
/// consecutive integers is divisible by i!). Returns 0 when k > n, which the
/// unranking candidate scan relies on.
///
/// Counted variant adds 1 to from_scratch_builds and k to coeff_updates.
ExactNat binom(std::uint32_t n, std::uint32_t k, OpCounter& ops);
ExactNat binom(std::uint32_t n, std::uint32_t k);

/// floor(log2 C(n, k)) via the exact bit length, never via floating point.
/// Requires 1 <= k <= n.
std::uint32_t p1_bits(std::uint32_t n, std::uint32_t k);

/// Quadratic-time combinadic unranking: the X-th k-combination of
/// {0, ..., n-1} in colexicographic order. Candidate values descend from
/// n - 1 and every candidate's binomial coefficient is rebuilt from scratch.
/// Requires 1 <= k <= n and X < C(n, k), else throws std::domain_error.
/// Resets ops on entry.
IndexCoefficients unrank_original(const ExactNat& x, std::uint32_t n,
                                  std::uint32_t k, OpCounter& ops);

/// Quadratic-time combinadic ranking: sum of C(c_i, i) with every term built
/// from scratch. Throws std::domain_error on invariant violations.
/// Resets ops on entry.
ExactNat rank_original(const IndexCoefficients& c, std::uint32_t n,
                       std::uint32_t k, OpCounter& ops);

/// Linear-time combinadic unranking. Identical output to unrank_original on
/// every valid input. Builds exactly one coefficient from scratch, then walks
/// candidates with one constant-time update per step, so
/// coeff_updates <= n + k on return and from_scratch_builds == 1.
IndexCoefficients unrank_linear(const ExactNat& x, std::uint32_t n,
                                std::uint32_t k, OpCounter& ops);

/// Linear-time combinadic ranking. Identical output to rank_original.
/// Skips leading null terms (c_i < i), builds at most one coefficient from
/// scratch and sweeps the remaining candidates with constant-time updates,
/// so coeff_updates <= n + k and from_scratch_builds <= 1.
ExactNat rank_linear(const IndexCoefficients& c, std::uint32_t n,
                     std::uint32_t k, OpCounter& ops);

/// All k-combinations of {0, ..., n-1} in colexicographic order, generated by
/// direct successor iteration (independent of the ranking algorithms above).
/// Position j in the result is by definition the combination of rank j.
/// Refuses with std::domain_error("oracle scale exceeded") when
/// C(n, k) > oracle_scale_limit().
std::vector<IndexCoefficients> oracle_colex_enumerate(std::uint32_t n,
                                                      std::uint32_t k);

constexpr std::uint64_t oracle_scale_limit() { return 10'000'000; }

/// Exhaustive cross-check of both algorithm pairs against the enumeration
/// oracle, for all 1 <= k <= n <= max_n and every rank.
///
/// fault, when set, perturbs each unranked combination before checking; it
/// exists so tests can confirm the sweep actually detects mismatches.
struct VerifyReport {
  bool passed = true;
  std::uint64_t cases_checked = 0;
  std::uint32_t fail_n = 0;
  std::uint32_t fail_k = 0;
  ExactNat fail_x;
  std::string detail;
};

using CoeffFault = std::function<void(IndexCoefficients&, std::uint32_t n,
                                      std::uint32_t k, const ExactNat& x)>;

VerifyReport verify_sweep(std::uint32_t max_n, std::uint64_t case_limit,
                          const CoeffFault* fault = nullptr);

}  // namespace ofdmim
