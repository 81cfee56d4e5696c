#pragma once

#include <cstdint>
#include <optional>

#include "kltest/divergence.hpp"
#include "kltest/simplex.hpp"

namespace kltest {

/// Result of the exhaustive grid minimizer.
struct GridMinimum {
  Distribution argmin;
  double value_bits;
};

/// The two-sample optimal exponent computed three ways.
struct ExponentReport {
  /// Normalized coordinatewise geometric mean of P and Q; empty when the
  /// supports are disjoint (infinite-exponent regime).
  std::optional<Distribution> mixture;
  ExtendedReal closed_form;  // D(M||P) + D(M||Q), bits
  ExtendedReal renyi_half;   // renyi(1/2, P, Q), bits
  /// Grid-oracle infimum; present when the supports overlap and d <= 4.
  std::optional<GridMinimum> grid;
};

/// Optimal one-sample type II exponent: kl(P, Q), bits.
ExtendedReal stein_exponent(const Distribution& p, const Distribution& q);

/// Normalized coordinatewise geometric mean sqrt(p_k q_k) / sum_i sqrt(p_i q_i),
/// the minimizer of D(F||P) + D(F||Q). Throws std::domain_error when the
/// supports are disjoint (the exponent is infinite there).
Distribution geometric_mixture(const Distribution& p, const Distribution& q);

/// Raw large-deviation bound (n+1)^d * 2^(-n*exponent_bits); may exceed 1,
/// callers clamp for display.
double sanov_upper_bound(std::int64_t n, int d, double exponent_bits);

/// Exhaustive simplex grid search for min_F D(F||P) + D(F||Q), restricted to
/// the common support, step = resolution, with one refinement pass at step
/// resolution/10 around the incumbent. Ties resolve to the lexicographically
/// lowest grid point. Requires d <= 4 and resolution in (0, 0.5]; throws
/// std::domain_error on disjoint supports.
GridMinimum minimize_kl_sum_grid(const Distribution& p, const Distribution& q,
                                 double resolution);

/// Computes the optimal two-sample exponent in closed form, as the
/// order-1/2 Renyi divergence, and (for d <= 4) by the grid oracle.
ExponentReport two_sample_exponent(const Distribution& p,
                                   const Distribution& q,
                                   double resolution = 1e-3);

}  // namespace kltest
