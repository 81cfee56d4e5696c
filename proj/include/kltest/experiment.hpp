#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "kltest/simplex.hpp"
#include "kltest/testing.hpp"

namespace kltest {

enum class RunMode { monte_carlo, exact_when_feasible };
enum class EstimateMethod { exact, monte_carlo };

/// A seeded error-rate experiment over a grid of sample counts.
struct ExperimentSpec {
  TestKind test = TestKind::two_sample;
  Distribution null_law;                 // P; the H0 law for both tests
  std::optional<Distribution> alt_law;   // Q; defaults to P when absent
  std::vector<std::int64_t> n_grid;      // strictly increasing
  std::int64_t trials = 1;
  double eps = 0.05;
  TestVariant variant = TestVariant::forward;  // two-sample only
  std::uint64_t master_seed = 0;
  RunMode mode = RunMode::monte_carlo;
  int workers = 1;

  const Distribution& alt() const { return alt_law ? *alt_law : null_law; }
  void validate() const;
};

/// Point estimates with two-sided 95% intervals. Exact-method rows have
/// degenerate intervals and trials = 0.
struct ErrorEstimate {
  std::int64_t n;
  double alpha_hat, alpha_lo, alpha_hi;
  double beta_hat, beta_lo, beta_hi;
  EstimateMethod method;
  std::int64_t trials;
};

struct Interval {
  double lo, hi;
};

/// Wilson score interval at 95%, valid near 0 and 1.
Interval wilson_interval(std::int64_t successes, std::int64_t trials);

/// n i.i.d. symbols from the law by inverse CDF over a SplitMix64 stream.
/// Identical (law, n, seed) always produces the identical sequence.
std::vector<int> sample_iid(const Distribution& law, std::int64_t n,
                            std::uint64_t seed);

/// Estimates alpha (rejection rate under H0) and beta (acceptance rate under
/// H1) for each n in the grid. In exact_when_feasible mode, grid points
/// within the oracle's enumeration guards use exact probabilities; the rest
/// fall back to Monte Carlo, reported in the method field.
std::vector<ErrorEstimate> mc_error_rates(const ExperimentSpec& spec);

/// One (n, -log2(beta)/n) observation fed to the exponent fit.
struct FitPoint {
  std::int64_t n;
  double rate_bits;
};

/// Least-squares fit of -log2(beta) against n. Points with beta = 0 are
/// excluded and counted, never fitted.
struct ExponentFit {
  std::vector<FitPoint> points;  // the fitted points, as per-sample rates
  double slope_bits;             // bits per sample
  double intercept_bits;
  std::optional<double> target_bits;
  std::optional<double> gap_bits;  // |slope - target| when a target is given
  std::int64_t zero_beta_points;
};

/// Fits the decay exponent from (n, beta) pairs. Requires at least two
/// points with beta > 0; throws when all betas are zero (infinite-exponent
/// regime).
ExponentFit exponent_fit(const std::vector<std::pair<std::int64_t, double>>& n_beta,
                         std::optional<double> target_bits = std::nullopt);

/// One grid point of the strong-converse demonstration.
struct ConversePoint {
  std::int64_t n;
  /// Acceptance probability of the witness test under (P, Q): it accepts H0
  /// exactly when at least one empirical falls outside B(M, c).
  double type_ii;
  /// Probability under X^n, Y^n ~ M that both empiricals land in B(M, c);
  /// a lower bound on the witness test's type I error, trending to 1.
  double ball_mass_mixture;
  EstimateMethod method;
};

struct ConverseReport {
  Distribution mixture;   // the geometric mixture of P and Q
  double threshold_bits;  // ball radius c
  double eps_display;     // carried through for reporting only
  std::vector<ConversePoint> points;
};

enum class ConverseMode { exact, monte_carlo };

/// Demonstrates the strong-converse trade-off on the witness test whose
/// acceptance region excludes B(M, c) x B(M, c), where M is the geometric
/// mixture of P and Q. Requires overlapping supports, P != Q, and c > 0.
/// Exact mode enumerates types; grid points beyond the enumeration guard
/// fall back to Monte Carlo (reported per point).
ConverseReport converse_demo(const Distribution& p, const Distribution& q,
                             double threshold_bits,
                             const std::vector<std::int64_t>& n_grid,
                             double eps_display, ConverseMode mode,
                             std::uint64_t master_seed,
                             std::int64_t trials = 10000, int workers = 1);

}  // namespace kltest
