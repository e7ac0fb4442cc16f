#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace phonovec {

/// Cosine similarity; NaN when either vector has zero norm.
template <typename A, typename B>
double cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double na = a.template cast<double>().norm();
  const double nb = b.template cast<double>().norm();
  if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return a.template cast<double>().dot(b.template cast<double>()) / (na * nb);
}

/// Quantile function of the standard normal distribution.
double normal_quantile(double p);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_stddev(std::span<const double> xs);
/// Linear-interpolated quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

/// 1-based ranks; ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);
double pearson(std::span<const double> xs, std::span<const double> ys);
/// Pearson correlation of average ranks. Throws ConstantSeries when either
/// series has no variation and LengthMismatch when sizes differ or n < 3.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Area under the ROC curve via the Mann-Whitney statistic (ties count half).
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

}  // namespace phonovec
