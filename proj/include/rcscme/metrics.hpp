#ifndef RCSCME_METRICS_HPP
#define RCSCME_METRICS_HPP

#include <utility>
#include <vector>

#include "rcscme/types.hpp"

namespace rcscme {

constexpr double kSdrCapDb = 100.0;

// Scale-projected source-to-distortion ratio in dB, capped at 100 dB.
// The estimate is first projected onto the reference with a least-squares
// scalar, making the metric invariant to scaling and sign.
double sdr(const Vec& estimate, const Vec& reference);

struct MetricReport {
  double input_sdr_db = 0.0;
  double sdr_db = 0.0;              // final output SDR
  double sdr_improvement_db = 0.0;  // final minus input
  double peak_improvement_db = 0.0;
  int peak_iteration = 0;
  std::vector<std::pair<int, double>> per_iteration;  // (iteration, improvement)
};

// Improvement trajectory for a run: per_iteration[k] is the extraction after
// iteration k (index 0 = initialization point).
MetricReport evaluate_run(const std::vector<Vec>& per_iteration_estimates,
                          const Vec& reference, const Vec& mixture_reference);

}  // namespace rcscme

#endif  // RCSCME_METRICS_HPP
