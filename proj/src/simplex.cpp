#include "kltest/simplex.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kltest {

namespace detail {

void require_same_alphabet(int dp, int dq, const char* what) {
  if (dp != dq) {
    throw std::invalid_argument(std::string(what) + ": alphabet size mismatch (" +
                                std::to_string(dp) + " vs " + std::to_string(dq) + ")");
  }
}

}  // namespace detail

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("Distribution: alphabet size must be at least 1");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kSumTolerance) {
      throw std::invalid_argument("Distribution: entry at index " + std::to_string(i) +
                                  " is outside [0, 1]: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("Distribution: entries sum to " + std::to_string(sum) +
                                ", not 1");
  }
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) {
    throw std::invalid_argument("EmpiricalDistribution: alphabet size must be at least 1");
  }
  n_ = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 0) {
      throw std::invalid_argument("EmpiricalDistribution: negative count at index " +
                                  std::to_string(i));
    }
    n_ += counts_[i];
  }
  if (n_ < 1) {
    throw std::invalid_argument("EmpiricalDistribution: total sample count must be positive");
  }
}

Distribution EmpiricalDistribution::induced() const {
  std::vector<double> probs(counts_.size());
  const double n = static_cast<double>(n_);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    probs[i] = static_cast<double>(counts_[i]) / n;
  }
  return Distribution(std::move(probs));
}

Distribution make_distribution(std::span<const double> weights) {
  if (weights.empty()) {
    throw std::invalid_argument("make_distribution: empty weight vector");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("make_distribution: weight at index " +
                                  std::to_string(i) + " is negative or non-finite");
    }
    sum += w;
  }
  if (sum <= 0.0) {
    throw std::invalid_argument("make_distribution: all weights are zero");
  }
  std::vector<double> probs(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    probs[i] = weights[i] / sum;
  }
  return Distribution(std::move(probs));
}

Distribution make_distribution(std::initializer_list<double> weights) {
  return make_distribution(std::span<const double>(weights.begin(), weights.size()));
}

EmpiricalDistribution empirical_from_samples(std::span<const int> samples, int d) {
  if (d < 1) {
    throw std::invalid_argument("empirical_from_samples: alphabet size must be at least 1");
  }
  if (samples.empty()) {
    throw std::invalid_argument("empirical_from_samples: empty sample sequence");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  for (std::size_t pos = 0; pos < samples.size(); ++pos) {
    const int s = samples[pos];
    if (s < 0 || s >= d) {
      throw std::invalid_argument("empirical_from_samples: symbol " + std::to_string(s) +
                                  " at position " + std::to_string(pos) +
                                  " is outside [0, " + std::to_string(d) + ")");
    }
    ++counts[static_cast<std::size_t>(s)];
  }
  return EmpiricalDistribution(std::move(counts));
}

double min_positive_prob(const Distribution& p) {
  double best = 1.0;
  bool found = false;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > kSupportZero && p[i] <= best) {
      best = p[i];
      found = true;
    }
  }
  if (!found) {
    // Unreachable for a valid Distribution; entries sum to 1.
    throw std::logic_error("min_positive_prob: distribution has no positive entry");
  }
  return best;
}

bool is_absolutely_continuous(const Distribution& p, const Distribution& q) {
  detail::require_same_alphabet(p.size(), q.size(), "is_absolutely_continuous");
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > kSupportZero && q[i] <= kSupportZero) {
      return false;
    }
  }
  return true;
}

}  // namespace kltest
