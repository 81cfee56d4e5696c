#include "kltest/divergence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kltest {

namespace {
constexpr double kNegativeSlack = 1e-12;
const double kLn2 = std::log(2.0);
}  // namespace

ExtendedReal ExtendedReal::from_bits(double bits) {
  if (std::isnan(bits)) {
    throw std::invalid_argument("ExtendedReal: NaN is not a divergence value");
  }
  if (bits < 0.0) {
    if (bits < -kNegativeSlack) {
      throw std::logic_error("ExtendedReal: value " + std::to_string(bits) +
                             " is below the negative slack");
    }
    bits = 0.0;
  }
  return ExtendedReal(bits);
}

ExtendedReal kl(const Distribution& p, const Distribution& q) {
  detail::require_same_alphabet(p.size(), q.size(), "kl");
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= kSupportZero) continue;  // 0*log(0/q) = 0
    if (q[i] <= kSupportZero) return ExtendedReal::infinity();
    sum += p[i] * std::log2(p[i] / q[i]);
  }
  return ExtendedReal::from_bits(sum);
}

double total_variation(const Distribution& p, const Distribution& q) {
  detail::require_same_alphabet(p.size(), q.size(), "total_variation");
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    sum += std::abs(p[i] - q[i]);
  }
  return 0.5 * sum;
}

ExtendedReal renyi(double alpha, const Distribution& p, const Distribution& q) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("renyi: alpha must lie strictly inside (0, 1), got " +
                                std::to_string(alpha));
  }
  detail::require_same_alphabet(p.size(), q.size(), "renyi");
  double sum = 0.0;
  bool overlap = false;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= kSupportZero || q[i] <= kSupportZero) continue;
    overlap = true;
    sum += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (!overlap) return ExtendedReal::infinity();
  return ExtendedReal::from_bits(std::log2(sum) / (alpha - 1.0));
}

double continuity_bound(const Distribution& c, double eps) {
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("continuity_bound: eps must be nonnegative, got " +
                                std::to_string(eps));
  }
  const double c_min = min_positive_prob(c);
  return 2.0 * std::log2(1.0 / c_min) * eps +
         (2.0 * std::sqrt(2.0) / kLn2) * std::sqrt(eps);
}

ExtendedReal kl_chi_square_upper(const Distribution& p, const Distribution& q) {
  detail::require_same_alphabet(p.size(), q.size(), "kl_chi_square_upper");
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (q[i] <= kSupportZero) {
      if (p[i] > kSupportZero) return ExtendedReal::infinity();
      continue;
    }
    const double diff = p[i] - q[i];
    sum += diff * diff / q[i];
  }
  return ExtendedReal::from_bits(sum / kLn2);
}

}  // namespace kltest
