// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tokengraph/error.hpp"

namespace tokengraph {

ConfusionCounts confusion_counts(std::span<const int> preds, std::span<const int> golds, std::size_t classes) {
  if (preds.size() != golds.size()) {
    throw ValidationError("metrics: " + std::to_string(preds.size()) + " predictions vs " +
                          std::to_string(golds.size()) + " gold labels");
  }
  if (preds.empty()) throw ValidationError("metrics: empty input");
  ConfusionCounts c;
  c.true_positive.assign(classes, 0);
  c.false_positive.assign(classes, 0);
  c.false_negative.assign(classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i];
    const int g = golds[i];
    if (p < 0 || g < 0 || static_cast<std::size_t>(p) >= classes || static_cast<std::size_t>(g) >= classes) {
      throw ValidationError("metrics: label outside [0, " + std::to_string(classes) + ") at position " +
                            std::to_string(i));
    }
    if (p == g) {
      ++c.true_positive[static_cast<std::size_t>(p)];
    } else {
      ++c.false_positive[static_cast<std::size_t>(p)];
      ++c.false_negative[static_cast<std::size_t>(g)];
    }
  }
  return c;
}

double accuracy(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size()) {
    throw ValidationError("accuracy: " + std::to_string(preds.size()) + " predictions vs " +
                          std::to_string(golds.size()) + " gold labels");
  }
  if (preds.empty()) throw ValidationError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == golds[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double macro_f1(std::span<const int> preds, std::span<const int> golds, std::size_t classes) {
  if (classes == 0) throw ValidationError("macro_f1: zero classes");
  const ConfusionCounts c = confusion_counts(preds, golds, classes);
  double total = 0.0;
  for (std::size_t k = 0; k < classes; ++k) {
    const double tp = static_cast<double>(c.true_positive[k]);
    if (tp == 0.0) continue;
    // 2PR / (P + R) simplifies to 2TP / (2TP + FP + FN).
    total += 2.0 * tp / (2.0 * tp + static_cast<double>(c.false_positive[k] + c.false_negative[k]));
  }
  return total / static_cast<double>(classes);
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

namespace {

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

}  // namespace

double sample_std(std::span<const double> values) { return std::sqrt(sample_variance(values)); }

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta: continued fraction did not converge for a=" + std::to_string(a) +
                     " b=" + std::to_string(b) + " x=" + std::to_string(x));
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("t distribution: df must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha,
                         std::size_t comparisons) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("welch_t_test: need at least 2 values per sample (got " + std::to_string(a.size()) +
                          " and " + std::to_string(b.size()) + ")");
  }
  if (comparisons == 0) throw ValidationError("welch_t_test: Bonferroni comparison count must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("welch_t_test: alpha must be in (0, 1)");
  WelchResult r;
  r.alpha = alpha;
  r.comparisons = comparisons;

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double mean_a = mean_of(a);
  const double mean_b = mean_of(b);
  double var_a = sample_variance(a);
  double var_b = sample_variance(b);
  if (var_a < kVarianceFloor || var_b < kVarianceFloor) r.variance_floored = true;
  var_a = std::max(var_a, kVarianceFloor);
  var_b = std::max(var_b, kVarianceFloor);

  const double se_a = var_a / na;
  const double se_b = var_b / nb;
  const double se = se_a + se_b;
  r.df = se * se / (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
  r.t = mean_a == mean_b ? 0.0 : (mean_a - mean_b) / std::sqrt(se);
  r.p = student_t_two_sided_p(r.t, r.df);
  r.significant = r.p < alpha / static_cast<double>(comparisons);
  return r;
}

}  // namespace tokengraph
