#include "kltest/exponent.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kltest {

namespace {

// Indices where both laws put mass. Any minimizer of D(F||P) + D(F||Q) is
// supported there, so the grid never leaves this set.
std::vector<int> common_support(const Distribution& p, const Distribution& q) {
  std::vector<int> support;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > kSupportZero && q[i] > kSupportZero) support.push_back(i);
  }
  return support;
}

// D(F||P) + D(F||Q) in bits for F given as grid counts m/scale on the
// support set.
double kl_sum_bits(std::span<const std::int64_t> m, double scale,
                   std::span<const int> support, const Distribution& p,
                   const Distribution& q) {
  double sum = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] == 0) continue;
    const double f = static_cast<double>(m[j]) / scale;
    const int i = support[j];
    sum += f * (2.0 * std::log2(f) - std::log2(p[i]) - std::log2(q[i]));
  }
  return sum;
}

Distribution grid_point_to_distribution(std::span<const std::int64_t> m,
                                        double scale,
                                        std::span<const int> support, int d) {
  std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
  for (std::size_t j = 0; j < m.size(); ++j) {
    probs[static_cast<std::size_t>(support[j])] = static_cast<double>(m[j]) / scale;
  }
  return make_distribution(probs);
}

}  // namespace

ExtendedReal stein_exponent(const Distribution& p, const Distribution& q) {
  detail::require_same_alphabet(p.size(), q.size(), "stein_exponent");
  return kl(p, q);
}

Distribution geometric_mixture(const Distribution& p, const Distribution& q) {
  detail::require_same_alphabet(p.size(), q.size(), "geometric_mixture");
  std::vector<double> weights(static_cast<std::size_t>(p.size()), 0.0);
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > kSupportZero && q[i] > kSupportZero) {
      weights[static_cast<std::size_t>(i)] = std::sqrt(p[i] * q[i]);
      sum += weights[static_cast<std::size_t>(i)];
    }
  }
  if (sum <= 0.0) {
    throw std::domain_error(
        "geometric_mixture: supports are disjoint, the exponent is infinite");
  }
  for (double& w : weights) w /= sum;
  return Distribution(std::move(weights));
}

double sanov_upper_bound(std::int64_t n, int d, double exponent_bits) {
  if (n < 1) {
    throw std::invalid_argument("sanov_upper_bound: sample count must be >= 1");
  }
  if (d < 1) {
    throw std::invalid_argument("sanov_upper_bound: alphabet size must be >= 1");
  }
  if (!(exponent_bits >= 0.0)) {
    throw std::invalid_argument("sanov_upper_bound: exponent must be nonnegative, got " +
                                std::to_string(exponent_bits));
  }
  const double nn = static_cast<double>(n);
  return std::exp2(d * std::log2(nn + 1.0) - nn * exponent_bits);
}

GridMinimum minimize_kl_sum_grid(const Distribution& p, const Distribution& q,
                                 double resolution) {
  detail::require_same_alphabet(p.size(), q.size(), "minimize_kl_sum_grid");
  if (p.size() > 4) {
    throw std::invalid_argument(
        "minimize_kl_sum_grid: grid search supports d <= 4; use the closed form "
        "for larger alphabets");
  }
  if (!(resolution > 0.0 && resolution <= 0.5)) {
    throw std::invalid_argument("minimize_kl_sum_grid: resolution must lie in (0, 0.5], got " +
                                std::to_string(resolution));
  }
  const std::vector<int> support = common_support(p, q);
  if (support.empty()) {
    throw std::domain_error(
        "minimize_kl_sum_grid: supports are disjoint, the exponent is infinite");
  }
  const int k = static_cast<int>(support.size());

  if (k == 1) {
    std::vector<std::int64_t> point{1};
    const double value = kl_sum_bits(point, 1.0, support, p, q);
    return {grid_point_to_distribution(point, 1.0, support, p.size()), value};
  }

  const std::int64_t M = std::max<std::int64_t>(2, std::llround(1.0 / resolution));
  std::vector<std::int64_t> m(static_cast<std::size_t>(k), 0);
  std::vector<std::int64_t> best_m = m;
  double best_value = 0.0;
  bool have_best = false;

  // Coarse pass: every composition of M into k parts, ascending lexicographic;
  // strict improvement keeps the lexicographically lowest among ties.
  auto scan = [&](auto&& self, int pos, std::int64_t remaining) -> void {
    if (pos == k - 1) {
      m[static_cast<std::size_t>(pos)] = remaining;
      const double value = kl_sum_bits(m, static_cast<double>(M), support, p, q);
      if (!have_best || value < best_value) {
        have_best = true;
        best_value = value;
        best_m = m;
      }
      return;
    }
    for (std::int64_t c = 0; c <= remaining; ++c) {
      m[static_cast<std::size_t>(pos)] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  scan(scan, 0, M);

  // One refinement at step resolution/10 inside the box incumbent +- 10*resolution.
  // The box provably contains the true minimizer (Pinsker radius of the coarse
  // incumbent's value gap).
  const std::int64_t fine = 10;
  const std::int64_t Mf = M * fine;
  const std::int64_t halfwidth = 100;  // fine units; = 10 * resolution
  std::vector<std::int64_t> center(best_m.size());
  for (std::size_t j = 0; j < best_m.size(); ++j) center[j] = best_m[j] * fine;

  std::vector<std::int64_t> lo(center.size()), hi(center.size());
  for (std::size_t j = 0; j < center.size(); ++j) {
    lo[j] = std::max<std::int64_t>(0, center[j] - halfwidth);
    hi[j] = std::min<std::int64_t>(Mf, center[j] + halfwidth);
  }

  std::vector<std::int64_t> mf(static_cast<std::size_t>(k), 0);
  std::vector<std::int64_t> best_mf = center;
  double best_fine = kl_sum_bits(center, static_cast<double>(Mf), support, p, q);

  auto refine = [&](auto&& self, int pos, std::int64_t remaining) -> void {
    if (pos == k - 1) {
      if (remaining < lo[static_cast<std::size_t>(pos)] ||
          remaining > hi[static_cast<std::size_t>(pos)]) {
        return;
      }
      mf[static_cast<std::size_t>(pos)] = remaining;
      const double value = kl_sum_bits(mf, static_cast<double>(Mf), support, p, q);
      if (value < best_fine) {
        best_fine = value;
        best_mf = mf;
      }
      return;
    }
    for (std::int64_t c = lo[static_cast<std::size_t>(pos)];
         c <= std::min(hi[static_cast<std::size_t>(pos)], remaining); ++c) {
      mf[static_cast<std::size_t>(pos)] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  refine(refine, 0, Mf);

  return {grid_point_to_distribution(best_mf, static_cast<double>(Mf), support, p.size()),
          best_fine};
}

ExponentReport two_sample_exponent(const Distribution& p, const Distribution& q,
                                   double resolution) {
  detail::require_same_alphabet(p.size(), q.size(), "two_sample_exponent");
  ExponentReport report{std::nullopt, ExtendedReal::infinity(),
                        ExtendedReal::infinity(), std::nullopt};
  if (common_support(p, q).empty()) {
    return report;  // disjoint supports: both values +inf
  }
  const Distribution mixture = geometric_mixture(p, q);
  report.closed_form = kl(mixture, p) + kl(mixture, q);
  report.renyi_half = renyi(0.5, p, q);
  report.mixture = mixture;
  if (p.size() <= 4) {
    report.grid = minimize_kl_sum_grid(p, q, resolution);
  }
  return report;
}

}  // namespace kltest
