#include "ofdmim/combinadic.hpp"

#include <stdexcept>

namespace ofdmim {

std::size_t bit_length(const ExactNat& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

namespace {

// Running-product binomial. The zero convention for k > n falls out of the
// product itself: the factor at i = n + 1 is zero and the value stays zero.
ExactNat binom_product(std::uint32_t n, std::uint32_t k, OpCounter* ops) {
  ExactNat value = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    const unsigned long factor = (i <= n) ? (n - i + 1) : 0ul;
    value *= factor;
    mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(), i);
  }
  if (ops != nullptr) {
    ops->from_scratch_builds += 1;
    ops->coeff_updates += k;
  }
  return value;
}

void require_unrank_domain(const ExactNat& x, std::uint32_t n,
                           std::uint32_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("unrank: k must satisfy 1 <= k <= n");
  }
  // Validation stays off the books: counters describe the algorithm only.
  if (x < 0 || x >= binom_product(n, k, nullptr)) {
    throw std::domain_error("rank out of range");
  }
}

void require_coefficients(const IndexCoefficients& c, std::uint32_t n,
                          std::uint32_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("rank: k must satisfy 1 <= k <= n");
  }
  if (c.coeffs.size() != k) {
    throw std::domain_error("rank: coefficient count differs from k");
  }
  if (c.coeffs.front() > n - 1) {
    throw std::domain_error("rank: largest coefficient exceeds n - 1");
  }
  for (std::size_t j = 1; j < c.coeffs.size(); ++j) {
    if (c.coeffs[j - 1] <= c.coeffs[j]) {
      throw std::domain_error("rank: coefficients not strictly decreasing");
    }
  }
}

}  // namespace

ExactNat binom(std::uint32_t n, std::uint32_t k, OpCounter& ops) {
  return binom_product(n, k, &ops);
}

ExactNat binom(std::uint32_t n, std::uint32_t k) {
  return binom_product(n, k, nullptr);
}

std::uint32_t p1_bits(std::uint32_t n, std::uint32_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("p1_bits: k must satisfy 1 <= k <= n");
  }
  const ExactNat value = binom_product(n, k, nullptr);
  return static_cast<std::uint32_t>(bit_length(value) - 1);
}

IndexCoefficients unrank_original(const ExactNat& x, std::uint32_t n,
                                  std::uint32_t k, OpCounter& ops) {
  require_unrank_domain(x, n, k);
  ops.reset();

  IndexCoefficients out;
  out.coeffs.resize(k);
  ExactNat remaining = x;
  ExactNat candidate_value;
  std::uint32_t candidate = n;  // decremented before the first test
  for (std::uint32_t i = k; i >= 1; --i) {
    do {
      --candidate;
      candidate_value = binom_product(candidate, i, &ops);
    } while (candidate_value > remaining);
    out.coeffs[k - i] = candidate;
    remaining -= candidate_value;
  }
  return out;
}

ExactNat rank_original(const IndexCoefficients& c, std::uint32_t n,
                       std::uint32_t k, OpCounter& ops) {
  require_coefficients(c, n, k);
  ops.reset();

  ExactNat x = 0;
  for (std::uint32_t i = 1; i <= k; ++i) {
    x += binom_product(c.coeffs[k - i], i, &ops);
  }
  return x;
}

IndexCoefficients unrank_linear(const ExactNat& x, std::uint32_t n,
                                std::uint32_t k, OpCounter& ops) {
  require_unrank_domain(x, n, k);
  ops.reset();

  // Trailing coefficients stay zero when the candidate cursor hits zero;
  // that only happens when the single remaining coefficient is forced to 0.
  IndexCoefficients out;
  out.coeffs.assign(k, 0);

  ExactNat remaining = x;
  std::uint32_t candidate = n - 1;
  // The only from-scratch build; every later value derives from it.
  ExactNat value = binom_product(candidate, k, &ops);

  for (std::uint32_t i = k; i >= 1; --i) {
    std::uint32_t ci = candidate;
    while (value > remaining) {
      // C(ci - 1, i) from C(ci, i): one multiply/divide pair.
      value *= (ci - i);
      mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(), ci);
      ops.coeff_updates += 1;
      --ci;
    }
    out.coeffs[k - i] = ci;
    remaining -= value;
    if (i == 1) break;
    candidate = ci - 1;
    if (candidate == 0) break;
    // C(ci - 1, i - 1) from C(ci, i): one multiply/divide pair.
    value *= i;
    mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(), ci);
    ops.coeff_updates += 1;
  }
  return out;
}

ExactNat rank_linear(const IndexCoefficients& c, std::uint32_t n,
                     std::uint32_t k, OpCounter& ops) {
  require_coefficients(c, n, k);
  ops.reset();

  // Skip leading null terms: strictly decreasing coefficients with c_i < i
  // force c_i = i - 1, whose term contributes nothing.
  std::uint32_t i = 1;
  while (i <= k && c.coeffs[k - i] < i) ++i;
  if (i > k) return ExactNat(0);

  // The only from-scratch build; the sweep derives every later value.
  ExactNat value = binom_product(c.coeffs[k - i], i, &ops);
  ExactNat x = 0;
  for (std::uint32_t cc = c.coeffs[k - i]; cc <= n - 1; ++cc) {
    if (c.coeffs[k - i] == cc) {
      x += value;
      if (i == k) break;  // all coefficients consumed
      // C(cc + 1, i + 1) from C(cc, i): one multiply/divide pair.
      value *= (cc + 1);
      mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(), i + 1);
      ops.coeff_updates += 1;
      ++i;
    } else {
      // C(cc + 1, i) from C(cc, i): one multiply/divide pair.
      value *= (cc + 1);
      mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(), cc + 1 - i);
      ops.coeff_updates += 1;
    }
  }
  return x;
}

std::vector<IndexCoefficients> oracle_colex_enumerate(std::uint32_t n,
                                                      std::uint32_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("oracle: k must satisfy 1 <= k <= n");
  }
  const ExactNat total = binom(n, k);
  if (total > oracle_scale_limit()) {
    throw std::domain_error("oracle scale exceeded");
  }

  std::vector<IndexCoefficients> out;
  out.reserve(total.get_ui());

  // Ascending working set; successor iteration in colexicographic order.
  std::vector<std::uint32_t> asc(k);
  for (std::uint32_t j = 0; j < k; ++j) asc[j] = j;

  for (;;) {
    IndexCoefficients c;
    c.coeffs.assign(asc.rbegin(), asc.rend());
    out.push_back(std::move(c));

    std::uint32_t j = 0;
    while (j + 1 < k && asc[j] + 1 == asc[j + 1]) ++j;
    if (asc[j] + 1 >= n) break;
    ++asc[j];
    for (std::uint32_t t = 0; t < j; ++t) asc[t] = t;
  }
  return out;
}

VerifyReport verify_sweep(std::uint32_t max_n, std::uint64_t case_limit,
                          const CoeffFault* fault) {
  VerifyReport report;

  // Size the sweep up front so oversized requests refuse instead of running.
  ExactNat total_cases = 0;
  for (std::uint32_t n = 1; n <= max_n; ++n) {
    for (std::uint32_t k = 1; k <= n; ++k) {
      const ExactNat cnk = binom(n, k);
      if (cnk > oracle_scale_limit()) {
        throw std::domain_error("oracle scale exceeded");
      }
      total_cases += cnk;
    }
  }
  if (total_cases > case_limit) {
    throw std::domain_error("verification sweep exceeds case limit");
  }

  OpCounter ops;
  for (std::uint32_t n = 1; n <= max_n && report.passed; ++n) {
    for (std::uint32_t k = 1; k <= n && report.passed; ++k) {
      const auto oracle = oracle_colex_enumerate(n, k);
      ExactNat x = 0;
      for (const auto& expected : oracle) {
        IndexCoefficients got = unrank_original(x, n, k, ops);
        if (fault != nullptr) (*fault)(got, n, k, x);

        std::string mismatch;
        try {
          if (got != expected) {
            mismatch = "quadratic unranking disagrees with colex oracle";
          } else if (unrank_linear(x, n, k, ops) != expected) {
            mismatch = "linear unranking disagrees with colex oracle";
          } else if (rank_original(got, n, k, ops) != x) {
            mismatch = "quadratic ranking does not invert unranking";
          } else if (rank_linear(got, n, k, ops) != x) {
            mismatch = "linear ranking does not invert unranking";
          }
        } catch (const std::exception& e) {
          // A corrupted combination may violate the ranking preconditions.
          mismatch = std::string("check raised: ") + e.what();
        }
        if (!mismatch.empty()) {
          report.passed = false;
          report.fail_n = n;
          report.fail_k = k;
          report.fail_x = x;
          report.detail = std::move(mismatch);
          break;
        }
        ++report.cases_checked;
        ++x;
      }
    }
  }
  return report;
}

}  // namespace ofdmim
