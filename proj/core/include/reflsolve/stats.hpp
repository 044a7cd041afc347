#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace reflsolve {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleSummary {
  double mean = 0.0;
  /// Standard error of the mean, s/√N with the unbiased sample deviation.
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Summarizes samples in the order given, so the result is independent of how
/// they were produced.
inline SampleSummary summarize(std::span<const double> samples) {
  SampleSummary out;
  out.count = samples.size();
  if (samples.empty()) return out;
  CompensatedSum sum;
  for (double v : samples) sum.add(v);
  out.mean = sum.value() / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    CompensatedSum sq;
    for (double v : samples) sq.add((v - out.mean) * (v - out.mean));
    const double var = sq.value() / static_cast<double>(samples.size() - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return out;
}

}  // namespace reflsolve
