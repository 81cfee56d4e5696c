#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace kltest {

// Entries with magnitude at or below this are treated as exact zeros in all
// support queries, so downstream +infinity decisions never fire on
// floating-point dust.
inline constexpr double kSupportZero = 1e-12;

// Tolerance for "probabilities sum to one".
inline constexpr double kSumTolerance = 1e-9;

/// A probability distribution over the finite alphabet {0, ..., d-1}.
/// Immutable after construction; construction validates the simplex
/// invariants (entries in [0,1], sum within 1e-9 of 1, d >= 1).
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  int size() const noexcept { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  bool operator==(const Distribution& other) const noexcept {
    return probs_ == other.probs_;
  }

 private:
  std::vector<double> probs_;
};

/// Integer count vector plus total sample count n; the "type" of a sample
/// sequence. counts sum exactly to n.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<std::int64_t> counts);

  int size() const noexcept { return static_cast<int>(counts_.size()); }
  std::int64_t count(int i) const { return counts_[static_cast<std::size_t>(i)]; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::int64_t n() const noexcept { return n_; }

  /// The induced distribution counts[i] / n.
  Distribution induced() const;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t n_;
};

/// Normalizes a nonnegative weight vector into a Distribution.
/// Throws std::invalid_argument on empty input, a negative entry (naming its
/// index), or an all-zero input.
Distribution make_distribution(std::span<const double> weights);
Distribution make_distribution(std::initializer_list<double> weights);

/// Counts symbol occurrences in a sample sequence over alphabet {0,...,d-1}.
/// Throws std::invalid_argument on an empty sequence or an out-of-range
/// symbol (naming position and value).
EmpiricalDistribution empirical_from_samples(std::span<const int> samples, int d);

/// Smallest strictly positive entry of P. A valid Distribution always has one.
double min_positive_prob(const Distribution& p);

/// True iff supp(P) is contained in supp(Q), with entries <= kSupportZero
/// treated as zero. Throws on dimension mismatch.
bool is_absolutely_continuous(const Distribution& p, const Distribution& q);

namespace detail {
// Shared dimension check; `what` names the operation for the error message.
void require_same_alphabet(int dp, int dq, const char* what);
}  // namespace detail

}  // namespace kltest
