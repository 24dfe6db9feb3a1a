#include "rcscme/metrics.hpp"

#include <cmath>

namespace rcscme {

double sdr(const Vec& estimate, const Vec& reference) {
  if (estimate.size() != reference.size())
    throw ConfigError("sdr: length mismatch");
  const double ref_power = reference.squaredNorm();
  if (!(ref_power > 0.0)) throw ConfigError("sdr: zero reference");

  const double alpha = reference.dot(estimate) / ref_power;
  const Vec projected = alpha * reference;
  const double signal = projected.squaredNorm();
  const double distortion = (projected - estimate).squaredNorm();
  if (!(signal > 0.0)) return -kSdrCapDb;
  if (distortion <= 0.0) return kSdrCapDb;
  return std::min(10.0 * std::log10(signal / distortion), kSdrCapDb);
}

MetricReport evaluate_run(const std::vector<Vec>& per_iteration_estimates,
                          const Vec& reference, const Vec& mixture_reference) {
  if (per_iteration_estimates.empty())
    throw ConfigError("evaluate_run: empty trajectory");

  MetricReport report;
  report.input_sdr_db = sdr(mixture_reference, reference);
  report.per_iteration.reserve(per_iteration_estimates.size());
  for (size_t k = 0; k < per_iteration_estimates.size(); ++k) {
    const double improvement =
        sdr(per_iteration_estimates[k], reference) - report.input_sdr_db;
    report.per_iteration.emplace_back(static_cast<int>(k), improvement);
    if (k == 0 || improvement > report.peak_improvement_db) {
      report.peak_improvement_db = improvement;
      report.peak_iteration = static_cast<int>(k);
    }
  }
  report.sdr_improvement_db = report.per_iteration.back().second;
  report.sdr_db = report.input_sdr_db + report.sdr_improvement_db;
  return report;
}

}  // namespace rcscme
