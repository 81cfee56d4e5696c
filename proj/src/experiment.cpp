#include "kltest/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kltest/exponent.hpp"
#include "kltest/oracle.hpp"
#include "kltest/rng.hpp"

namespace kltest {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Roles feeding derive_seed; every drawn sequence has its own slot.
enum Role : std::uint64_t { kNullX = 0, kNullY = 1, kAltX = 2, kAltY = 3 };

// Runs fn(trial) for trial in [0, trials) on `workers` threads and sums the
// per-trial 0/1 results. Trial t is claimed by worker t % workers, and each
// trial derives its own seeds, so the totals are identical for any worker
// count.
std::int64_t count_over_trials(std::int64_t trials, int workers,
                               const std::function<bool(std::int64_t)>& fn) {
  if (workers <= 1) {
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) hits += fn(t) ? 1 : 0;
    return hits;
  }
  std::vector<std::int64_t> partial(static_cast<std::size_t>(workers), 0);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::int64_t hits = 0;
      for (std::int64_t t = w; t < trials; t += workers) hits += fn(t) ? 1 : 0;
      partial[static_cast<std::size_t>(w)] = hits;
    });
  }
  for (auto& th : pool) th.join();
  std::int64_t hits = 0;
  for (std::int64_t h : partial) hits += h;
  return hits;
}

bool exact_feasible(const ExperimentSpec& spec, std::int64_t n) {
  const std::uint64_t count = type_count(n, spec.null_law.size());
  if (spec.test == TestKind::one_sample) return count <= kMaxTypes;
  return count <= kMaxTypePairs / count;
}

ErrorEstimate exact_estimate(const ExperimentSpec& spec, std::int64_t n) {
  ExactErrorReport report =
      spec.test == TestKind::one_sample
          ? exact_one_sample_errors(spec.null_law, spec.alt(), n, spec.eps)
          : exact_two_sample_errors(spec.null_law, spec.alt(), n, spec.eps,
                                    spec.variant);
  return {n,
          report.type_1, report.type_1, report.type_1,
          report.type_2, report.type_2, report.type_2,
          EstimateMethod::exact, 0};
}

ErrorEstimate monte_carlo_estimate(const ExperimentSpec& spec, std::int64_t n) {
  const int d = spec.null_law.size();
  const double c = ThresholdSchedule{spec.eps, spec.test, std::nullopt}.threshold(n, d);
  const Distribution& p = spec.null_law;
  const Distribution& q = spec.alt();
  const std::uint64_t un = static_cast<std::uint64_t>(n);

  auto reject_under_null = [&](std::int64_t trial) {
    const auto ut = static_cast<std::uint64_t>(trial);
    if (spec.test == TestKind::one_sample) {
      const auto x = sample_iid(p, n, derive_seed(spec.master_seed, un, ut, kNullX));
      return one_sample_decide(p, empirical_from_samples(x, d), c).verdict == Verdict::h1;
    }
    const auto x = sample_iid(p, n, derive_seed(spec.master_seed, un, ut, kNullX));
    const auto y = sample_iid(p, n, derive_seed(spec.master_seed, un, ut, kNullY));
    return two_sample_decide(empirical_from_samples(x, d),
                             empirical_from_samples(y, d), c, spec.variant)
               .verdict == Verdict::h1;
  };
  auto accept_under_alt = [&](std::int64_t trial) {
    const auto ut = static_cast<std::uint64_t>(trial);
    if (spec.test == TestKind::one_sample) {
      const auto x = sample_iid(q, n, derive_seed(spec.master_seed, un, ut, kAltX));
      return one_sample_decide(p, empirical_from_samples(x, d), c).verdict == Verdict::h0;
    }
    const auto x = sample_iid(p, n, derive_seed(spec.master_seed, un, ut, kAltX));
    const auto y = sample_iid(q, n, derive_seed(spec.master_seed, un, ut, kAltY));
    return two_sample_decide(empirical_from_samples(x, d),
                             empirical_from_samples(y, d), c, spec.variant)
               .verdict == Verdict::h0;
  };

  const std::int64_t rejects = count_over_trials(spec.trials, spec.workers, reject_under_null);
  const std::int64_t accepts = count_over_trials(spec.trials, spec.workers, accept_under_alt);
  const Interval alpha_ci = wilson_interval(rejects, spec.trials);
  const Interval beta_ci = wilson_interval(accepts, spec.trials);
  const double trials = static_cast<double>(spec.trials);
  return {n,
          static_cast<double>(rejects) / trials, alpha_ci.lo, alpha_ci.hi,
          static_cast<double>(accepts) / trials, beta_ci.lo, beta_ci.hi,
          EstimateMethod::monte_carlo, spec.trials};
}

}  // namespace

void ExperimentSpec::validate() const {
  if (alt_law) {
    detail::require_same_alphabet(null_law.size(), alt_law->size(), "ExperimentSpec");
  }
  if (n_grid.empty()) {
    throw std::invalid_argument("ExperimentSpec: n_grid must be nonempty");
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) {
      throw std::invalid_argument("ExperimentSpec: sample counts must be >= 1");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("ExperimentSpec: n_grid must be strictly increasing");
    }
  }
  if (trials < 1) {
    throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("ExperimentSpec: level must lie in (0, 1)");
  }
  if (workers < 1) {
    throw std::invalid_argument("ExperimentSpec: workers must be >= 1");
  }
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials < 1) {
    throw std::invalid_argument("wilson_interval: trials must be >= 1");
  }
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: successes outside [0, trials]");
  }
  const double t = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / t;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / t;
  const double center = (phat + z2 / (2.0 * t)) / denom;
  const double half =
      kZ95 * std::sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t)) / denom;
  // Exact endpoints at the boundary counts; the formula gives them up to
  // rounding noise only.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

std::vector<int> sample_iid(const Distribution& law, std::int64_t n,
                            std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("sample_iid: sample count must be >= 1");
  }
  std::vector<double> cdf(static_cast<std::size_t>(law.size()));
  double acc = 0.0;
  for (int i = 0; i < law.size(); ++i) {
    acc += law[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  cdf.back() = 1.0;  // close the fp gap so every draw lands
  SplitMix64 stream(seed);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const double u = stream.next_unit();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    out[static_cast<std::size_t>(k)] =
        static_cast<int>(std::distance(cdf.begin(), it));
  }
  return out;
}

std::vector<ErrorEstimate> mc_error_rates(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ErrorEstimate> estimates;
  estimates.reserve(spec.n_grid.size());
  for (const std::int64_t n : spec.n_grid) {
    if (spec.mode == RunMode::exact_when_feasible && exact_feasible(spec, n)) {
      estimates.push_back(exact_estimate(spec, n));
    } else {
      estimates.push_back(monte_carlo_estimate(spec, n));
    }
  }
  return estimates;
}

ExponentFit exponent_fit(const std::vector<std::pair<std::int64_t, double>>& n_beta,
                         std::optional<double> target_bits) {
  ExponentFit fit;
  fit.target_bits = target_bits;
  fit.zero_beta_points = 0;
  std::vector<double> xs, ys;
  for (const auto& [n, beta] : n_beta) {
    if (n < 1) {
      throw std::invalid_argument("exponent_fit: sample counts must be >= 1");
    }
    if (beta < 0.0 || beta > 1.0) {
      throw std::invalid_argument("exponent_fit: beta outside [0, 1]");
    }
    if (beta == 0.0) {
      ++fit.zero_beta_points;
      continue;
    }
    xs.push_back(static_cast<double>(n));
    ys.push_back(-std::log2(beta));
    fit.points.push_back({n, ys.back() / static_cast<double>(n)});
  }
  if (xs.empty()) {
    throw std::domain_error(
        "exponent_fit: every beta is zero; the decay exponent is infinite");
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("exponent_fit: need at least two points with beta > 0");
  }
  const double count = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("exponent_fit: sample counts must be distinct");
  }
  fit.slope_bits = sxy / sxx;
  fit.intercept_bits = mean_y - fit.slope_bits * mean_x;
  if (target_bits) {
    fit.gap_bits = std::abs(fit.slope_bits - *target_bits);
  }
  return fit;
}

ConverseReport converse_demo(const Distribution& p, const Distribution& q,
                             double threshold_bits,
                             const std::vector<std::int64_t>& n_grid,
                             double eps_display, ConverseMode mode,
                             std::uint64_t master_seed, std::int64_t trials,
                             int workers) {
  detail::require_same_alphabet(p.size(), q.size(), "converse_demo");
  if (!(threshold_bits > 0.0)) {
    throw std::invalid_argument("converse_demo: ball radius must be positive");
  }
  if (total_variation(p, q) <= kSupportZero) {
    throw std::invalid_argument("converse_demo: the two laws must differ");
  }
  if (n_grid.empty()) {
    throw std::invalid_argument("converse_demo: n_grid must be nonempty");
  }
  if (trials < 1) {
    throw std::invalid_argument("converse_demo: trials must be >= 1");
  }
  const Distribution mixture = geometric_mixture(p, q);  // throws on disjoint supports
  const int d = p.size();

  ConverseReport report{mixture, threshold_bits, eps_display, {}};
  report.points.reserve(n_grid.size());

  for (const std::int64_t n : n_grid) {
    if (n < 1) {
      throw std::invalid_argument("converse_demo: sample counts must be >= 1");
    }
    const bool exact = mode == ConverseMode::exact && type_count(n, d) <= kMaxTypes;
    if (exact) {
      // One enumeration classifies each type against the ball; the three
      // in-ball masses then give both reported probabilities.
      const MultinomialTable table_p(p, n);
      const MultinomialTable table_q(q, n);
      const MultinomialTable table_m(mixture, n);
      double in_p = 0.0, in_q = 0.0, in_m = 0.0;
      for_each_type(n, d, [&](std::span<const std::int64_t> t) {
        if (detail::kl_type_vs_law_bits(t, n, mixture) <= threshold_bits) {
          in_p += table_p.mass(t);
          in_q += table_q.mass(t);
          in_m += table_m.mass(t);
        }
      });
      const double accept_pq = std::clamp(1.0 - in_p * in_q, 0.0, 1.0);
      const double ball_mm = std::clamp(in_m * in_m, 0.0, 1.0);
      report.points.push_back({n, accept_pq, ball_mm, EstimateMethod::exact});
      continue;
    }
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    auto in_ball = [&](const std::vector<int>& samples) {
      const auto type = empirical_from_samples(samples, d);
      return detail::kl_type_vs_law_bits(type.counts(), n, mixture) <= threshold_bits;
    };
    const std::int64_t accepts = count_over_trials(
        trials, workers, [&](std::int64_t trial) {
          const auto ut = static_cast<std::uint64_t>(trial);
          const auto x = sample_iid(p, n, derive_seed(master_seed, un, ut, 2));
          const auto y = sample_iid(q, n, derive_seed(master_seed, un, ut, 3));
          return !in_ball(x) || !in_ball(y);
        });
    const std::int64_t both_in = count_over_trials(
        trials, workers, [&](std::int64_t trial) {
          const auto ut = static_cast<std::uint64_t>(trial);
          const auto x = sample_iid(mixture, n, derive_seed(master_seed, un, ut, 0));
          const auto y = sample_iid(mixture, n, derive_seed(master_seed, un, ut, 1));
          return in_ball(x) && in_ball(y);
        });
    const double t = static_cast<double>(trials);
    report.points.push_back({n, static_cast<double>(accepts) / t,
                             static_cast<double>(both_in) / t,
                             EstimateMethod::monte_carlo});
  }
  return report;
}

}  // namespace kltest
