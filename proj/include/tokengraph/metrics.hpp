// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tokengraph {

struct ConfusionCounts {
  std::vector<std::size_t> true_positive;
  std::vector<std::size_t> false_positive;
  std::vector<std::size_t> false_negative;

  std::size_t classes() const { return true_positive.size(); }
};

/// Throws ValidationError for length mismatches, empty input or labels outside [0, classes).
ConfusionCounts confusion_counts(std::span<const int> preds, std::span<const int> golds, std::size_t classes);

double accuracy(std::span<const int> preds, std::span<const int> golds);

/// Unweighted mean of per-class F1 over all `classes`. A class with no true
/// positives scores 0, including a class that never occurs in either list.
double macro_f1(std::span<const int> preds, std::span<const int> golds, std::size_t classes);

inline constexpr double kVarianceFloor = 1e-12;

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
  double alpha = 0.05;
  std::size_t comparisons = 1;
  bool significant = false;
  bool variance_floored = false;
};

/// Unpaired two-sample t-test with Welch-Satterthwaite degrees of freedom.
/// Sample variances below kVarianceFloor are raised to it. significant is
/// p < alpha / comparisons (Bonferroni). Needs >= 2 values per side.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05,
                         std::size_t comparisons = 1);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

/// Two-sided p-value of Student's t distribution.
double student_t_two_sided_p(double t, double df);

double mean_of(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);

}  // namespace tokengraph
