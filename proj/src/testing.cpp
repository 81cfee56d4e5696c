#include "kltest/testing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kltest {

namespace {

void require_schedule_params(std::int64_t n, int d, double eps, const char* what) {
  if (n < 1) {
    throw std::invalid_argument(std::string(what) + ": sample count must be >= 1, got " +
                                std::to_string(n));
  }
  if (d < 1) {
    throw std::invalid_argument(std::string(what) + ": alphabet size must be >= 1, got " +
                                std::to_string(d));
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": level must lie in (0, 1), got " +
                                std::to_string(eps));
  }
}

void require_threshold(double c, const char* what) {
  if (!(c >= 0.0)) {
    throw std::invalid_argument(std::string(what) + ": threshold must be nonnegative, got " +
                                std::to_string(c));
  }
}

}  // namespace

double hoeffding_threshold(std::int64_t n, int d, double eps) {
  require_schedule_params(n, d, eps, "hoeffding_threshold");
  const double nn = static_cast<double>(n);
  return (d * std::log2(nn + 1.0) + std::log2(1.0 / eps)) / nn;
}

TwoSampleThresholds two_sample_threshold(std::int64_t n, int d, double eps) {
  return two_sample_threshold(n, d, eps, 0.5);
}

TwoSampleThresholds two_sample_threshold(std::int64_t n, int d, double eps,
                                         double gamma) {
  require_schedule_params(n, d, eps, "two_sample_threshold");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("two_sample_threshold: gamma must lie in (0, 1), got " +
                                std::to_string(gamma));
  }
  const double nn = static_cast<double>(n);
  // log2(1) = 0 makes the d*log2(n)/n term total at n = 1.
  const double delta = (1.0 + std::log2(1.0 / eps)) / nn + d * std::log2(nn) / nn;
  return {delta, delta + std::pow(nn, gamma - 1.0)};
}

double ThresholdSchedule::threshold(std::int64_t n, int d) const {
  if (kind == TestKind::one_sample) {
    return hoeffding_threshold(n, d, eps);
  }
  return gamma ? two_sample_threshold(n, d, eps, *gamma).c
               : two_sample_threshold(n, d, eps).c;
}

Decision one_sample_decide(const Distribution& nominal,
                           const EmpiricalDistribution& sample,
                           double threshold_bits) {
  detail::require_same_alphabet(nominal.size(), sample.size(), "one_sample_decide");
  require_threshold(threshold_bits, "one_sample_decide");
  const ExtendedReal statistic = kl(sample.induced(), nominal);
  const Verdict verdict = statistic <= threshold_bits ? Verdict::h0 : Verdict::h1;
  return {verdict, statistic, threshold_bits, std::nullopt};
}

Decision two_sample_decide(const EmpiricalDistribution& x,
                           const EmpiricalDistribution& y,
                           double threshold_bits, TestVariant variant) {
  detail::require_same_alphabet(x.size(), y.size(), "two_sample_decide");
  require_threshold(threshold_bits, "two_sample_decide");
  if (x.n() != y.n()) {
    throw std::invalid_argument(
        "two_sample_decide: unequal sample counts are unsupported (" +
        std::to_string(x.n()) + " vs " + std::to_string(y.n()) + ")");
  }
  const Distribution px = x.induced();
  const Distribution py = y.induced();
  ExtendedReal statistic = ExtendedReal::from_bits(0.0);
  switch (variant) {
    case TestVariant::forward:
      statistic = kl(px, py);
      break;
    case TestVariant::reverse:
      statistic = kl(py, px);
      break;
    case TestVariant::min_of_both: {
      const ExtendedReal f = kl(px, py);
      const ExtendedReal r = kl(py, px);
      statistic = f <= r ? f : r;
      break;
    }
  }
  const Verdict verdict = statistic <= threshold_bits ? Verdict::h0 : Verdict::h1;
  return {verdict, statistic, threshold_bits, variant};
}

const char* to_string(TestVariant v) {
  switch (v) {
    case TestVariant::forward: return "forward";
    case TestVariant::reverse: return "reverse";
    case TestVariant::min_of_both: return "min";
  }
  return "?";
}

const char* to_string(Verdict v) {
  return v == Verdict::h0 ? "H0" : "H1";
}

}  // namespace kltest
