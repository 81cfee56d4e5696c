#pragma once

#include <compare>
#include <limits>

#include "kltest/simplex.hpp"

namespace kltest {

/// A nonnegative real number of bits, or +infinity. Return type of all
/// divergences. Finite construction clamps tiny negatives (cancellation
/// noise within 1e-12) to zero and rejects anything more negative.
class ExtendedReal {
 public:
  static ExtendedReal infinity() noexcept {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }
  static ExtendedReal from_bits(double bits);

  bool is_finite() const noexcept {
    return bits_ != std::numeric_limits<double>::infinity();
  }
  /// Finite value, or +inf as a double.
  double bits() const noexcept { return bits_; }

  friend auto operator<=>(ExtendedReal a, ExtendedReal b) noexcept {
    return a.bits_ <=> b.bits_;
  }
  friend bool operator==(ExtendedReal a, ExtendedReal b) noexcept {
    return a.bits_ == b.bits_;
  }
  friend auto operator<=>(ExtendedReal a, double b) noexcept {
    return a.bits_ <=> b;
  }
  friend bool operator==(ExtendedReal a, double b) noexcept {
    return a.bits_ == b;
  }
  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) noexcept {
    return ExtendedReal(a.bits_ + b.bits_);
  }

 private:
  explicit ExtendedReal(double bits) noexcept : bits_(bits) {}
  double bits_;
};

/// Kullback-Leibler divergence in bits, sum_i p_i log2(p_i/q_i), with the
/// conventions 0*log(0/q) = 0 and p*log(p/0) = +inf. Infinite exactly when
/// supp(P) is not contained in supp(Q).
ExtendedReal kl(const Distribution& p, const Distribution& q);

/// Total variation distance, 0.5 * sum_i |p_i - q_i|, in [0, 1].
double total_variation(const Distribution& p, const Distribution& q);

/// Renyi divergence of order alpha in (0,1), in bits:
/// (1/(alpha-1)) * log2(sum_i p_i^alpha q_i^(1-alpha)), terms with p_i = 0 or
/// q_i = 0 contributing 0. Infinite iff the supports are disjoint.
ExtendedReal renyi(double alpha, const Distribution& p, const Distribution& q);

/// KLD continuity bound g(C, eps) = 2*log2(1/c_min)*eps + (2*sqrt(2)/ln 2)*sqrt(eps),
/// where c_min is the minimum positive entry of C. For A, B << C with
/// ||A - B||_1 <= eps this bounds |D(A||C) - D(B||C)|.
double continuity_bound(const Distribution& c, double eps);

/// Chi-square upper bound on KL: (1/ln 2) * sum over {i: q_i > 0} of
/// (p_i - q_i)^2 / q_i, or +inf if some p_i > 0 has q_i = 0. Dominates
/// kl(P, Q) whenever finite.
ExtendedReal kl_chi_square_upper(const Distribution& p, const Distribution& q);

}  // namespace kltest
