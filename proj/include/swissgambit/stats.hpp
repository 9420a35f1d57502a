#pragma once

// Welch's one-tailed t-test on final-rank samples, plus the Student-t tail via
// the regularized incomplete beta function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "swissgambit/core.hpp"

namespace swissgambit {

class StatsError : public Error {
 public:
  using Error::Error;
};

// Final ranks of one player over repeated completions of a prefix course.
struct RankSample {
  std::vector<int> ranks;

  std::size_t n() const { return ranks.size(); }
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;  // unbiased; zero for a single observation
};

inline Summary summarize(std::span<const int> sample) {
  if (sample.empty()) throw StatsError("empty sample");
  const double n = static_cast<double>(sample.size());
  Summary s;
  s.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  std::vector<int> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  if (sample.size() >= 2) {
    double ss = 0.0;
    for (int x : sample) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / (n - 1.0);
  }
  return s;
}

inline Summary summarize(const RankSample& sample) { return summarize(std::span<const int>(sample.ranks)); }

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
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
  for (int m = 1; m <= kMaxIter; ++m) {
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
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw StatsError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw StatsError("incomplete beta requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw StatsError("incomplete beta requires x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(T > t) for Student's t with df degrees of freedom.
inline double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw StatsError("degrees of freedom must be positive");
  if (std::isnan(t)) throw StatsError("t statistic is NaN");
  if (t == std::numeric_limits<double>::infinity()) return 0.0;
  if (t == -std::numeric_limits<double>::infinity()) return 1.0;
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_one_tailed = 0.5;
};

// One-tailed Welch test of H0 "the gambit sample does not have smaller ranks".
// A positive t favors the gambit. Degenerate samples with zero variance on both
// sides give p = 0 or 1 when the means differ and p = 1/2 when they agree.
inline WelchResult welch_one_tailed(std::span<const int> gambit, std::span<const int> actual) {
  if (gambit.size() < 2 || actual.size() < 2) throw StatsError("Welch test needs at least two observations per sample");
  const Summary g = summarize(gambit);
  const Summary a = summarize(actual);
  const double vg = g.variance / static_cast<double>(gambit.size());
  const double va = a.variance / static_cast<double>(actual.size());
  const double diff = a.mean - g.mean;
  WelchResult r;
  if (vg + va == 0.0) {
    r.df = static_cast<double>(gambit.size() + actual.size() - 2);
    if (diff > 0.0) {
      r.t = std::numeric_limits<double>::infinity();
      r.p_one_tailed = 0.0;
    } else if (diff < 0.0) {
      r.t = -std::numeric_limits<double>::infinity();
      r.p_one_tailed = 1.0;
    } else {
      r.t = 0.0;
      r.p_one_tailed = 0.5;
    }
    return r;
  }
  r.t = diff / std::sqrt(vg + va);
  r.df = (vg + va) * (vg + va) /
         (vg * vg / static_cast<double>(gambit.size() - 1) + va * va / static_cast<double>(actual.size() - 1));
  r.p_one_tailed = student_t_upper_tail(r.t, r.df);
  return r;
}

inline WelchResult welch_one_tailed(const RankSample& gambit, const RankSample& actual) {
  return welch_one_tailed(std::span<const int>(gambit.ranks), std::span<const int>(actual.ranks));
}

}  // namespace swissgambit
