#pragma once

#include <optional>

#include "kltest/divergence.hpp"
#include "kltest/simplex.hpp"

namespace kltest {

enum class TestKind { one_sample, two_sample };

/// Which empirical relative entropy the two-sample test thresholds.
enum class TestVariant { forward, reverse, min_of_both };

enum class Verdict { h0, h1 };

/// Outcome of a threshold test. Ties (statistic == threshold) accept H0.
struct Decision {
  Verdict verdict;
  ExtendedReal statistic;  // bits; recorded even when +inf
  double threshold;        // bits
  std::optional<TestVariant> variant;  // empty for the one-sample test
};

/// Level eps plus the rule family producing the thresholds c_n (and delta_n
/// for the two-sample schedule). gamma, when set, replaces the two-sample
/// n^(-1/2) term with n^(-1+gamma).
struct ThresholdSchedule {
  double eps;
  TestKind kind;
  std::optional<double> gamma;

  /// The decision threshold c_n for sample count n and alphabet size d.
  double threshold(std::int64_t n, int d) const;
};

/// One-sample threshold c_n = d*log2(n+1)/n + log2(1/eps)/n, in bits.
double hoeffding_threshold(std::int64_t n, int d, double eps);

struct TwoSampleThresholds {
  double delta;  // concentration radius delta_n, bits
  double c;      // decision threshold c_n = delta_n + n^(-1/2), bits
};

/// Two-sample schedule: delta_n = (1 + log2(1/eps))/n + d*log2(n)/n and
/// c_n = delta_n + n^(-1/2).
TwoSampleThresholds two_sample_threshold(std::int64_t n, int d, double eps);

/// Same delta_n, with the growth override c_n = delta_n + n^(-1+gamma),
/// gamma in (0,1).
TwoSampleThresholds two_sample_threshold(std::int64_t n, int d, double eps,
                                         double gamma);

/// Accepts H0 iff kl(sample-as-distribution, nominal) <= threshold_bits.
Decision one_sample_decide(const Distribution& nominal,
                           const EmpiricalDistribution& sample,
                           double threshold_bits);

/// Accepts H0 iff the variant's empirical divergence is <= threshold_bits.
/// Requires equal alphabet sizes and equal sample counts.
Decision two_sample_decide(const EmpiricalDistribution& x,
                           const EmpiricalDistribution& y,
                           double threshold_bits, TestVariant variant);

const char* to_string(TestVariant v);
const char* to_string(Verdict v);

}  // namespace kltest
