#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cvzk::stats {

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval for a binomial proportion.
Interval wilson(uint64_t successes, uint64_t trials, double z = 1.96);

/// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
double chi_square_pvalue(double chi2, size_t dof);

/// Pearson chi-square goodness-of-fit p-value: observed counts vs expected.
double chi_square_gof(const std::vector<uint64_t>& observed,
                      const std::vector<double>& expected);

/// Two-sample chi-square homogeneity test over shared categories.
double chi_square_two_sample(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b);

/// Fisher's method for aggregating independent p-values.
double fisher_aggregate(const std::vector<double>& pvalues);

/// Total variation distance between two normalized histograms.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Regularized incomplete gamma Q(a, x) (upper).
double gamma_q(double a, double x);

}  // namespace cvzk::stats
