#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kltest/simplex.hpp"
#include "kltest/testing.hpp"

namespace kltest {

// Enumeration guards. Exactness is the module's contract, so oversize
// requests fail loudly instead of truncating.
inline constexpr std::uint64_t kMaxTypes = 10'000'000;          // one-sequence scans
inline constexpr std::uint64_t kMaxTypePairs = 100'000'000;     // two-sequence scans

/// Exact finite-n error probabilities of a threshold test, from full
/// method-of-types enumeration.
struct ExactErrorReport {
  std::int64_t n;
  double type_1;  // P[reject H0 | H0]
  double type_2;  // P[accept H0 | H1]
  double c_n;     // decision threshold used, bits
  std::optional<double> delta_n;       // two-sample schedule only
  std::optional<TestVariant> variant;  // empty for the one-sample test
};

/// Number of types: C(n+d-1, d-1). Saturates at UINT64_MAX on overflow.
std::uint64_t type_count(std::int64_t n, int d);

/// Visits every count vector of d nonnegative integers summing to n, each
/// exactly once, in ascending lexicographic order.
void for_each_type(std::int64_t n, int d,
                   const std::function<void(std::span<const std::int64_t>)>& fn);

/// Materialized enumeration; guarded by kMaxTypes.
std::vector<std::vector<std::int64_t>> enumerate_types(std::int64_t n, int d);

/// Multinomial masses of types under a fixed law, computed in log space with
/// a log-factorial table precomputed up to n.
class MultinomialTable {
 public:
  MultinomialTable(const Distribution& law, std::int64_t n);

  /// Probability that n i.i.d. draws from the law produce this type.
  /// Zero when some counts[i] > 0 has law[i] = 0.
  double mass(std::span<const std::int64_t> counts) const;

  std::int64_t n() const noexcept { return n_; }

 private:
  std::vector<double> log_factorial_;  // ln k!, k = 0..n
  std::vector<double> log_prob_;       // ln p_i; NaN marks zero entries
  std::int64_t n_;
};

/// Multinomial mass of one type under a law; convenience wrapper around
/// MultinomialTable for one-off queries.
double type_probability(std::span<const std::int64_t> counts,
                        const Distribution& law);

/// Exact errors of the one-sample test at level eps: type I under the
/// nominal law, type II under the alternative, with c_n from
/// hoeffding_threshold. Guarded by kMaxTypes.
ExactErrorReport exact_one_sample_errors(const Distribution& nominal,
                                         const Distribution& alt,
                                         std::int64_t n, double eps);

/// Exact errors of the two-sample test at level eps: type I under (P, P),
/// type II under (P, Q), thresholds from two_sample_threshold. Guarded by
/// kMaxTypePairs on the squared enumeration.
ExactErrorReport exact_two_sample_errors(const Distribution& p,
                                         const Distribution& q,
                                         std::int64_t n, double eps,
                                         TestVariant variant);

/// Exact probability, under the law, that the empirical distribution of n
/// samples satisfies the predicate. Guarded by kMaxTypes.
double exact_region_probability(
    const Distribution& law, std::int64_t n,
    const std::function<bool(const EmpiricalDistribution&)>& predicate);

namespace detail {
/// KL divergence in bits of a type (counts/n) against a law, computed
/// straight from integer counts. +inf when the type leaves the law's support.
double kl_type_vs_law_bits(std::span<const std::int64_t> counts,
                           std::int64_t n, const Distribution& law);
}  // namespace detail

}  // namespace kltest
