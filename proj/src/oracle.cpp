#include "kltest/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kltest {

namespace detail {

double kl_type_vs_law_bits(std::span<const std::int64_t> counts, std::int64_t n,
                           const Distribution& law) {
  const double nn = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double pi = law[static_cast<int>(i)];
    if (pi <= kSupportZero) return std::numeric_limits<double>::infinity();
    const double f = static_cast<double>(counts[i]) / nn;
    sum += f * std::log2(f / pi);
  }
  return sum < 0.0 ? 0.0 : sum;
}

}  // namespace detail

namespace {

void require_enum_params(std::int64_t n, int d, const char* what) {
  if (n < 1) {
    throw std::invalid_argument(std::string(what) + ": sample count must be >= 1, got " +
                                std::to_string(n));
  }
  if (d < 1) {
    throw std::invalid_argument(std::string(what) + ": alphabet size must be >= 1, got " +
                                std::to_string(d));
  }
}

std::uint64_t guarded_type_count(std::int64_t n, int d, std::uint64_t guard,
                                 const char* what) {
  const std::uint64_t count = type_count(n, d);
  if (count > guard) {
    throw std::invalid_argument(std::string(what) + ": enumeration of " +
                                std::to_string(count) + " types exceeds the guard of " +
                                std::to_string(guard));
  }
  return count;
}

}  // namespace

std::uint64_t type_count(std::int64_t n, int d) {
  require_enum_params(n, d, "type_count");
  // C(n+d-1, d-1), exact integer arithmetic, saturating on overflow.
  unsigned __int128 result = 1;
  for (int i = 1; i <= d - 1; ++i) {
    result = result * static_cast<unsigned __int128>(n + i) / static_cast<unsigned>(i);
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

void for_each_type(std::int64_t n, int d,
                   const std::function<void(std::span<const std::int64_t>)>& fn) {
  require_enum_params(n, d, "for_each_type");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  counts.back() = n;
  for (;;) {
    fn(counts);
    // Lexicographic successor: move one unit onto the rightmost position that
    // still has mass strictly to its right.
    std::int64_t tail = 0;
    int i = d - 2;
    for (; i >= 0; --i) {
      tail += counts[static_cast<std::size_t>(i) + 1];
      if (tail > 0) break;
    }
    if (i < 0) return;  // counts = (n, 0, ..., 0) is last
    ++counts[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d - 1; ++j) counts[static_cast<std::size_t>(j)] = 0;
    counts[static_cast<std::size_t>(d) - 1] = tail - 1;
  }
}

std::vector<std::vector<std::int64_t>> enumerate_types(std::int64_t n, int d) {
  const std::uint64_t count = guarded_type_count(n, d, kMaxTypes, "enumerate_types");
  std::vector<std::vector<std::int64_t>> types;
  types.reserve(count);
  for_each_type(n, d, [&](std::span<const std::int64_t> t) {
    types.emplace_back(t.begin(), t.end());
  });
  return types;
}

MultinomialTable::MultinomialTable(const Distribution& law, std::int64_t n) : n_(n) {
  if (n < 1) {
    throw std::invalid_argument("MultinomialTable: sample count must be >= 1");
  }
  log_factorial_.resize(static_cast<std::size_t>(n) + 1);
  log_factorial_[0] = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    log_factorial_[static_cast<std::size_t>(k)] =
        log_factorial_[static_cast<std::size_t>(k) - 1] + std::log(static_cast<double>(k));
  }
  log_prob_.resize(static_cast<std::size_t>(law.size()));
  for (int i = 0; i < law.size(); ++i) {
    log_prob_[static_cast<std::size_t>(i)] =
        law[i] > kSupportZero ? std::log(law[i])
                              : std::numeric_limits<double>::quiet_NaN();
  }
}

double MultinomialTable::mass(std::span<const std::int64_t> counts) const {
  if (counts.size() != log_prob_.size()) {
    throw std::invalid_argument("MultinomialTable: alphabet size mismatch");
  }
  double log_mass = log_factorial_[static_cast<std::size_t>(n_)];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t c = counts[i];
    if (c == 0) continue;
    if (std::isnan(log_prob_[i])) return 0.0;  // mass on a zero-probability symbol
    log_mass += static_cast<double>(c) * log_prob_[i] -
                log_factorial_[static_cast<std::size_t>(c)];
  }
  return std::exp(log_mass);
}

double type_probability(std::span<const std::int64_t> counts, const Distribution& law) {
  if (static_cast<int>(counts.size()) != law.size()) {
    throw std::invalid_argument("type_probability: alphabet size mismatch");
  }
  std::int64_t n = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("type_probability: negative count");
    n += c;
  }
  if (n < 1) throw std::invalid_argument("type_probability: counts sum to zero");
  return MultinomialTable(law, n).mass(counts);
}

ExactErrorReport exact_one_sample_errors(const Distribution& nominal,
                                         const Distribution& alt, std::int64_t n,
                                         double eps) {
  detail::require_same_alphabet(nominal.size(), alt.size(), "exact_one_sample_errors");
  const int d = nominal.size();
  guarded_type_count(n, d, kMaxTypes, "exact_one_sample_errors");
  const double c_n = hoeffding_threshold(n, d, eps);
  const MultinomialTable under_null(nominal, n);
  const MultinomialTable under_alt(alt, n);
  double type_1 = 0.0;
  double type_2 = 0.0;
  for_each_type(n, d, [&](std::span<const std::int64_t> t) {
    const double stat = detail::kl_type_vs_law_bits(t, n, nominal);
    if (stat <= c_n) {
      type_2 += under_alt.mass(t);
    } else {
      type_1 += under_null.mass(t);
    }
  });
  return {n, type_1, type_2, c_n, std::nullopt, std::nullopt};
}

ExactErrorReport exact_two_sample_errors(const Distribution& p, const Distribution& q,
                                         std::int64_t n, double eps,
                                         TestVariant variant) {
  detail::require_same_alphabet(p.size(), q.size(), "exact_two_sample_errors");
  const int d = p.size();
  const std::uint64_t count = type_count(n, d);
  if (count > kMaxTypePairs / count) {
    throw std::invalid_argument("exact_two_sample_errors: " + std::to_string(count) +
                                "^2 type pairs exceed the guard of " +
                                std::to_string(kMaxTypePairs));
  }
  const auto schedule = two_sample_threshold(n, d, eps);
  const auto types = enumerate_types(n, d);
  const std::size_t t_count = types.size();

  // Marginal mass tables, one per law; pairs combine by independence.
  const MultinomialTable table_p(p, n);
  const MultinomialTable table_q(q, n);
  std::vector<double> mass_p(t_count), mass_q(t_count);
  for (std::size_t i = 0; i < t_count; ++i) {
    mass_p[i] = table_p.mass(types[i]);
    mass_q[i] = table_q.mass(types[i]);
  }

  // log2 of integers up to n; the statistic between two types needs only
  // count ratios, so the 1/n normalization cancels.
  std::vector<double> log2_int(static_cast<std::size_t>(n) + 1);
  log2_int[0] = 0.0;  // never used with a zero count
  for (std::int64_t k = 1; k <= n; ++k) {
    log2_int[static_cast<std::size_t>(k)] = std::log2(static_cast<double>(k));
  }
  const double nn = static_cast<double>(n);
  auto kl_types = [&](const std::vector<std::int64_t>& a,
                      const std::vector<std::int64_t>& b) {
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      const std::int64_t ai = a[static_cast<std::size_t>(i)];
      if (ai == 0) continue;
      const std::int64_t bi = b[static_cast<std::size_t>(i)];
      if (bi == 0) return std::numeric_limits<double>::infinity();
      sum += static_cast<double>(ai) / nn *
             (log2_int[static_cast<std::size_t>(ai)] - log2_int[static_cast<std::size_t>(bi)]);
    }
    return sum < 0.0 ? 0.0 : sum;
  };

  double type_1 = 0.0;
  double type_2 = 0.0;
  for (std::size_t s = 0; s < t_count; ++s) {
    for (std::size_t t = 0; t < t_count; ++t) {
      double stat = 0.0;
      switch (variant) {
        case TestVariant::forward:
          stat = kl_types(types[s], types[t]);
          break;
        case TestVariant::reverse:
          stat = kl_types(types[t], types[s]);
          break;
        case TestVariant::min_of_both:
          stat = std::min(kl_types(types[s], types[t]), kl_types(types[t], types[s]));
          break;
      }
      if (stat <= schedule.c) {
        type_2 += mass_p[s] * mass_q[t];
      } else {
        type_1 += mass_p[s] * mass_p[t];
      }
    }
  }
  return {n, type_1, type_2, schedule.c, schedule.delta, variant};
}

double exact_region_probability(
    const Distribution& law, std::int64_t n,
    const std::function<bool(const EmpiricalDistribution&)>& predicate) {
  const int d = law.size();
  guarded_type_count(n, d, kMaxTypes, "exact_region_probability");
  const MultinomialTable table(law, n);
  double total = 0.0;
  for_each_type(n, d, [&](std::span<const std::int64_t> t) {
    const EmpiricalDistribution type(std::vector<std::int64_t>(t.begin(), t.end()));
    if (predicate(type)) total += table.mass(t);
  });
  return total;
}

}  // namespace kltest
